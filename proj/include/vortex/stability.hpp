#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "vortex/continuation.hpp"
#include "vortex/interval.hpp"
#include "vortex/matrix.hpp"
#include "vortex/model.hpp"

namespace vortex {

enum class BlockKind { P, Q };
enum class SliceCase { Symmetric, SymmetricZeroMomentum, Asymmetric };

const char* to_string(BlockKind k);
const char* to_string(SliceCase c);

struct SliceBlock {
    int l = 0;
    BlockKind kind = BlockKind::P;
    CIMatrix columns;  // 3N x d
};

struct SliceBasis {
    SliceCase tag = SliceCase::Symmetric;
    int m = 1, n = 1, p = 0;
    std::vector<SliceBlock> blocks;
    std::array<int, 2> anchor_pair{0, 1};  // vortices playing a_1, a_2 when m = 1

    int dimension() const;
};

// Block that carries the symmetry kernel at zero momentum.
int kernel_block_index(int m);

SliceBasis build_slice(const Rings<Interval>& a, bool zero_momentum,
                       std::optional<std::array<int, 2>> pair = std::nullopt);
SliceBasis build_slice(const RingSystem& a, bool zero_momentum);

// Pair (i, k) with the largest |a_i . (e3 x a_k)| among non-pole vortices.
std::array<int, 2> choose_anchor_pair(const Config<double>& v);

struct BlockMatrix {
    int l = 0;
    BlockKind kind = BlockKind::P;
    CIMatrix matrix;  // Hermitian enclosure
};

std::vector<BlockMatrix> assemble_blocks(const SliceBasis& slice, const Rings<Interval>& a, const Interval& omega);
CIMatrix hermitize(const CIMatrix& m);

struct EigenpairEnclosure {
    Interval value;       // real part of the eigenvalue
    double radius = 0.0;  // NK radius in the realified sup norm
};

EigenpairEnclosure validate_simple_eigenpair(const CIMatrix& M, double lambda_bar,
                                             const std::vector<std::complex<double>>& v_bar,
                                             double cluster_tol = 0.0);

struct WindingOptions {
    double imag_halfwidth = 1.0;
    int cells = 64;
    int max_cells = 1024;
};

// Number of eigenvalues of every matrix in M inside |Re z - center| <= halfwidth, |Im z| <= imag_halfwidth.
int count_eigenvalues_winding(const CIMatrix& M, double center, double halfwidth, const WindingOptions& opt = {});

struct Cluster {
    double center = 0.0;
    double halfwidth = 0.0;
    int count = 0;
};

struct BlockSpectrum {
    int l = 0;
    BlockKind kind = BlockKind::P;
    int size = 0;
    std::vector<Interval> eigs;
    std::vector<Cluster> clusters;
    int kernel = 0;          // eigenvalues certified inside (-delta0, delta0)
    bool complete = false;   // every eigenvalue accounted for by disjoint enclosures
    bool positive = false;   // complete and every enclosure outside the kernel window is > 0
    std::optional<Interval> negative_witness;
    std::string note;
};

enum class Verdict { CertifiedStable, NotPositive, Inconclusive };
const char* to_string(Verdict v);

struct StabilityVerdict {
    Verdict verdict = Verdict::Inconclusive;
    Interval omega;
    Interval mu;
    std::vector<BlockSpectrum> blocks;
    bool zero_momentum = false;
    int kernel_block = -1;
    int kernel_count = 0;
    int witness_block = -1;
    std::string reason;
    bool whole_segment = false;  // set by stability_over_segment
};

struct StabilityOptions {
    double delta0 = 1e-8;
    double cluster_rel = 1e-6;
    double eps_start = 1e-6;
    double eps_cap = 1e-2;
    WindingOptions winding;
    unsigned workers = 1;
    int segment_pieces = 8;
    int segment_depth = 6;
};

BlockSpectrum analyze_block(const BlockMatrix& b, bool kernel_expected, int kernel_size,
                            const StabilityOptions& opt = {});

StabilityVerdict stability_test(const Rings<Interval>& a, const Interval& omega, const StabilityOptions& opt = {});
StabilityVerdict stability_test(const RingSystem& a, double omega, const StabilityOptions& opt = {});

StabilityVerdict stability_over_segment(const BranchCertificate& cert, const StabilityOptions& opt = {});

}  // namespace vortex
