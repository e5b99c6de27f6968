#pragma once

#include <Eigen/Core>

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

namespace boltzfact {

// Wigner 3j symbol from the Racah sum in exact integer arithmetic; one rounding at the end.
// Returns 0 when selection rules fail. Throws DomainError for negative l.
double wigner3j(int l1, int l2, int l3, int m1, int m2, int m3);

struct Channel {
    int l1 = 0, l2 = 0, l3 = 0;
    bool operator==(const Channel&) const = default;
};

bool channel_allowed(int l1, int l2, int l3);

// Triangle/parity-admissible (l1, l2, l3) in lexicographic order; tau is 0-based.
class ChannelTable {
public:
    ChannelTable() = default;
    explicit ChannelTable(int l_max);

    int l_max() const { return l_max_; }
    int size() const { return static_cast<int>(channels_.size()); }
    const Channel& operator[](int tau) const { return channels_[tau]; }
    const std::vector<Channel>& channels() const { return channels_; }

    std::optional<int> find(int l1, int l2, int l3) const;
    // Throws DomainError when the triplet is not a channel.
    int index(int l1, int l2, int l3) const;

private:
    int l_max_ = 0;
    std::vector<Channel> channels_;
    std::vector<int> lookup_;  // (l_max+1)^3 dense map, -1 when absent
};

ChannelTable enumerate_channels(int l_max);

// Rows map complex coefficients Y_l^mu (column mu + l) to real ones Y_{l m} (row m + l).
Eigen::MatrixXcd complex_to_real_U(int l);

// int Y_l1^m1 Y_l2^m2 Y_l3^m3 dOmega of complex harmonics (no conjugation).
double complex_gaunt(int l1, int m1, int l2, int m2, int l3, int m3);
// int Y_{l1 m1} Y_{l2 m2} Y_{l3 m3} dOmega of real harmonics.
double real_gaunt(int l1, int m1, int l2, int m2, int l3, int m3);

inline constexpr double kGauntZeroThreshold = 1e-15;

struct GauntEntry {
    std::uint32_t q1, q2, q3, tau;
    double g;
    bool operator==(const GauntEntry&) const = default;
};

struct GauntSlice {
    std::uint32_t tau, q1;
    std::uint32_t begin, end;  // row range [begin, end)
};

// Nonzero real Gaunt weights sorted by (tau, q1, q2, q3), 0-based indices.
class GauntCOO {
public:
    GauntCOO() = default;
    GauntCOO(int l_max, std::vector<GauntEntry> rows);

    int l_max() const { return l_max_; }
    std::size_t size() const { return rows_.size(); }
    const std::vector<GauntEntry>& rows() const { return rows_; }
    const std::vector<GauntSlice>& slices() const { return slices_; }
    std::size_t n_slices() const { return slices_.size(); }
    // True when rows are ordered by (tau, q1) so slices are contiguous.
    bool slice_sorted() const { return slice_sorted_; }

private:
    int l_max_ = 0;
    std::vector<GauntEntry> rows_;
    std::vector<GauntSlice> slices_;
    bool slice_sorted_ = true;
};

GauntCOO build_gaunt_coo(int l_max);
GauntCOO build_gaunt_coo(const ChannelTable& channels);

// Permutation listing row positions in (q3, q2, q1) lexicographic order, the layout in which
// the reference routing table is printed.
std::vector<std::size_t> column_major_order(const GauntCOO& coo);

}  // namespace boltzfact
