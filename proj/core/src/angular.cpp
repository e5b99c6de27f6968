#include "boltzfact/angular.hpp"

#include "boltzfact/basis.hpp"
#include "boltzfact/error.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <deque>
#include <cmath>
#include <mutex>
#include <numbers>
#include <numeric>

namespace boltzfact {

namespace mp = boost::multiprecision;
using BigInt = mp::cpp_int;

namespace {

// deque: references stay valid while the table grows
const BigInt& factorial(int n) {
    static std::deque<BigInt> table{BigInt(1)};
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    while (static_cast<int>(table.size()) <= n)
        table.push_back(table.back() * static_cast<unsigned>(table.size()));
    return table[n];
}

}  // namespace

double wigner3j(int l1, int l2, int l3, int m1, int m2, int m3) {
    if (l1 < 0 || l2 < 0 || l3 < 0) throw DomainError("wigner3j: negative angular momentum");
    if (std::abs(m1) > l1 || std::abs(m2) > l2 || std::abs(m3) > l3) return 0.0;
    if (m1 + m2 + m3 != 0) return 0.0;
    if (l3 < std::abs(l1 - l2) || l3 > l1 + l2) return 0.0;
    if (m1 == 0 && m2 == 0 && m3 == 0 && (l1 + l2 + l3) % 2 != 0) return 0.0;

    // Racah: sum_t (-1)^t / [t! (l3-l2+t+m1)! (l3-l1+t-m2)! (l1+l2-l3-t)! (l1-t-m1)! (l2-t+m2)!]
    const int t_min = std::max({0, l2 - l3 - m1, l1 - l3 + m2});
    const int t_max = std::min({l1 + l2 - l3, l1 - m1, l2 + m2});
    if (t_min > t_max) return 0.0;

    // Nested Horner form: S = a_{tmin} (1 + r_1 (1 + r_2 (...))), r_i = a_{t+1}/a_t exact
    BigInt num(1), den(1);
    for (int t = t_max - 1; t >= t_min; --t) {
        const long long rn = static_cast<long long>(l1 + l2 - l3 - t) * (l1 - t - m1) * (l2 - t + m2);
        const long long rd =
            static_cast<long long>(t + 1) * (l3 - l2 + t + 1 + m1) * (l3 - l1 + t + 1 - m2);
        // x <- 1 - (rn/rd) x
        num = den * rd - num * rn;
        den *= rd;
    }
    if (num == 0) return 0.0;
    const int t = t_min;
    const BigInt d_tmin = factorial(t) * factorial(l3 - l2 + t + m1) * factorial(l3 - l1 + t - m2) *
                          factorial(l1 + l2 - l3 - t) * factorial(l1 - t - m1) * factorial(l2 - t + m2);
    // value^2 = Delta * F * num^2 / (den^2 d_tmin^2)
    const BigInt sq_num = factorial(l1 + l2 - l3) * factorial(l1 - l2 + l3) * factorial(-l1 + l2 + l3) *
                          factorial(l1 + m1) * factorial(l1 - m1) * factorial(l2 + m2) *
                          factorial(l2 - m2) * factorial(l3 + m3) * factorial(l3 - m3) * num * num;
    const BigInt sq_den = factorial(l1 + l2 + l3 + 1) * d_tmin * d_tmin * den * den;
    using Float = mp::cpp_bin_float_50;
    const Float mag = mp::sqrt(Float(sq_num) / Float(sq_den));
    int sign = ((l1 - l2 - m3) % 2 == 0) ? 1 : -1;
    if (t_min % 2 != 0) sign = -sign;
    if ((num < 0) != (den < 0)) sign = -sign;
    return sign * static_cast<double>(mag);
}

bool channel_allowed(int l1, int l2, int l3) {
    return l1 >= 0 && l2 >= 0 && l3 >= 0 && std::abs(l2 - l3) <= l1 && l1 <= l2 + l3 &&
           (l1 + l2 + l3) % 2 == 0;
}

ChannelTable::ChannelTable(int l_max) : l_max_(l_max) {
    if (l_max < 0) throw DomainError("enumerate_channels: l_max must be >= 0");
    const std::size_t n = static_cast<std::size_t>(l_max + 1);
    lookup_.assign(n * n * n, -1);
    for (int l1 = 0; l1 <= l_max; ++l1)
        for (int l2 = 0; l2 <= l_max; ++l2)
            for (int l3 = 0; l3 <= l_max; ++l3)
                if (channel_allowed(l1, l2, l3)) {
                    lookup_[(l1 * n + l2) * n + l3] = static_cast<int>(channels_.size());
                    channels_.push_back({l1, l2, l3});
                }
}

std::optional<int> ChannelTable::find(int l1, int l2, int l3) const {
    if (l1 < 0 || l2 < 0 || l3 < 0 || l1 > l_max_ || l2 > l_max_ || l3 > l_max_) return std::nullopt;
    const std::size_t n = static_cast<std::size_t>(l_max_ + 1);
    const int v = lookup_[(l1 * n + l2) * n + l3];
    if (v < 0) return std::nullopt;
    return v;
}

int ChannelTable::index(int l1, int l2, int l3) const {
    auto t = find(l1, l2, l3);
    if (!t) throw DomainError("not an admissible channel");
    return *t;
}

ChannelTable enumerate_channels(int l_max) { return ChannelTable(l_max); }

Eigen::MatrixXcd complex_to_real_U(int l) {
    if (l < 0) throw DomainError("complex_to_real_U: negative l");
    const int n = 2 * l + 1;
    const double s = 1.0 / std::numbers::sqrt2;
    const std::complex<double> I(0.0, 1.0);
    Eigen::MatrixXcd U = Eigen::MatrixXcd::Zero(n, n);
    U(l, l) = 1.0;
    for (int m = 1; m <= l; ++m) {
        const double sgn = (m % 2) ? -1.0 : 1.0;
        // Y_{l,m} = (Y^{-m} + (-1)^m Y^m)/sqrt2
        U(l + m, l - m) = s;
        U(l + m, l + m) = sgn * s;
        // Y_{l,-m} = i (Y^{-m} - (-1)^m Y^m)/sqrt2
        U(l - m, l - m) = I * s;
        U(l - m, l + m) = -I * sgn * s;
    }
    return U;
}

double complex_gaunt(int l1, int m1, int l2, int m2, int l3, int m3) {
    if (m1 + m2 + m3 != 0 || !channel_allowed(l1, l2, l3)) return 0.0;
    if (std::abs(m1) > l1 || std::abs(m2) > l2 || std::abs(m3) > l3) return 0.0;
    const double pref = std::sqrt((2.0 * l1 + 1) * (2.0 * l2 + 1) * (2.0 * l3 + 1) / (4.0 * std::numbers::pi));
    return pref * wigner3j(l1, l2, l3, 0, 0, 0) * wigner3j(l1, l2, l3, m1, m2, m3);
}

namespace {

// Nonzero entries of row m of U_l: at most two (mu, value) pairs.
struct URow {
    int n = 0;
    int mu[2];
    std::complex<double> u[2];
};

URow u_row(int m) {
    const double s = 1.0 / std::numbers::sqrt2;
    const std::complex<double> I(0.0, 1.0);
    URow r;
    if (m == 0) {
        r.n = 1;
        r.mu[0] = 0;
        r.u[0] = 1.0;
    } else if (m > 0) {
        const double sgn = (m % 2) ? -1.0 : 1.0;
        r.n = 2;
        r.mu[0] = -m;
        r.u[0] = s;
        r.mu[1] = m;
        r.u[1] = sgn * s;
    } else {
        const int a = -m;
        const double sgn = (a % 2) ? -1.0 : 1.0;
        r.n = 2;
        r.mu[0] = -a;
        r.u[0] = I * s;
        r.mu[1] = a;
        r.u[1] = -I * sgn * s;
    }
    return r;
}

// Real Gaunt from a per-channel cache of 3j(l1 l2 l3; mu1 mu2 -mu1-mu2).
template <class ThreeJ>
double real_gaunt_with(int m1, int m2, int m3, double pref, const ThreeJ& tj) {
    const URow a = u_row(m1), b = u_row(m2), c = u_row(m3);
    std::complex<double> acc = 0.0;
    for (int i = 0; i < a.n; ++i)
        for (int j = 0; j < b.n; ++j)
            for (int k = 0; k < c.n; ++k)
                if (a.mu[i] + b.mu[j] + c.mu[k] == 0)
                    acc += a.u[i] * b.u[j] * c.u[k] * tj(a.mu[i], b.mu[j]);
    return pref * acc.real();
}

}  // namespace

double real_gaunt(int l1, int m1, int l2, int m2, int l3, int m3) {
    if (!channel_allowed(l1, l2, l3)) return 0.0;
    if (std::abs(m1) > l1 || std::abs(m2) > l2 || std::abs(m3) > l3) return 0.0;
    const double pref = std::sqrt((2.0 * l1 + 1) * (2.0 * l2 + 1) * (2.0 * l3 + 1) / (4.0 * std::numbers::pi)) *
                        wigner3j(l1, l2, l3, 0, 0, 0);
    return real_gaunt_with(m1, m2, m3, pref, [&](int mu1, int mu2) {
        return wigner3j(l1, l2, l3, mu1, mu2, -mu1 - mu2);
    });
}

GauntCOO::GauntCOO(int l_max, std::vector<GauntEntry> rows) : l_max_(l_max), rows_(std::move(rows)) {
    slice_sorted_ = std::is_sorted(rows_.begin(), rows_.end(), [](const GauntEntry& a, const GauntEntry& b) {
        return std::tie(a.tau, a.q1) < std::tie(b.tau, b.q1);
    });
    if (!slice_sorted_) return;
    for (std::size_t z = 0; z < rows_.size();) {
        std::size_t e = z;
        while (e < rows_.size() && rows_[e].tau == rows_[z].tau && rows_[e].q1 == rows_[z].q1) ++e;
        slices_.push_back({rows_[z].tau, rows_[z].q1, static_cast<std::uint32_t>(z), static_cast<std::uint32_t>(e)});
        z = e;
    }
}

GauntCOO build_gaunt_coo(const ChannelTable& channels) {
    std::vector<GauntEntry> rows;
    const double inv4pi = 1.0 / (4.0 * std::numbers::pi);
    for (int tau = 0; tau < channels.size(); ++tau) {
        const auto [l1, l2, l3] = channels[tau];
        const double tj0 = wigner3j(l1, l2, l3, 0, 0, 0);
        if (tj0 == 0.0) continue;
        const double pref = std::sqrt((2.0 * l1 + 1) * (2.0 * l2 + 1) * (2.0 * l3 + 1) * inv4pi) * tj0;
        // 3j(mu1, mu2, -mu1-mu2) cache for this channel
        const int w2 = 2 * l2 + 1;
        std::vector<double> tj(static_cast<std::size_t>(2 * l1 + 1) * w2, 0.0);
        for (int mu1 = -l1; mu1 <= l1; ++mu1)
            for (int mu2 = -l2; mu2 <= l2; ++mu2) {
                const int mu3 = -mu1 - mu2;
                if (std::abs(mu3) > l3) continue;
                // 3j(-mu) = (-1)^{l1+l2+l3} 3j(mu) with an even sum
                if (mu1 < 0 || (mu1 == 0 && mu2 < 0)) continue;
                const double v = wigner3j(l1, l2, l3, mu1, mu2, mu3);
                tj[(mu1 + l1) * w2 + mu2 + l2] = v;
                tj[(-mu1 + l1) * w2 - mu2 + l2] = v;
            }
        auto lookup = [&](int mu1, int mu2) { return tj[(mu1 + l1) * w2 + mu2 + l2]; };
        for (int m1 = -l1; m1 <= l1; ++m1)
            for (int m2 = -l2; m2 <= l2; ++m2) {
                // real coupling needs |m3| in {| |m1| - |m2| |, |m1| + |m2|}
                const int c1 = std::abs(std::abs(m1) - std::abs(m2));
                const int c2 = std::abs(m1) + std::abs(m2);
                int cand[4];
                int n_cand = 0;
                for (int v : {-c2, -c1, c1, c2})
                    if (n_cand == 0 || cand[n_cand - 1] != v) cand[n_cand++] = v;
                for (int i = 0; i < n_cand; ++i) {
                    const int m3 = cand[i];
                    if (std::abs(m3) > l3) continue;
                    const double g = real_gaunt_with(m1, m2, m3, pref, lookup);
                    if (std::abs(g) < kGauntZeroThreshold) continue;
                    rows.push_back({static_cast<std::uint32_t>(angular_index(l1, m1)),
                                    static_cast<std::uint32_t>(angular_index(l2, m2)),
                                    static_cast<std::uint32_t>(angular_index(l3, m3)),
                                    static_cast<std::uint32_t>(tau), g});
                }
            }
    }
    std::sort(rows.begin(), rows.end(), [](const GauntEntry& a, const GauntEntry& b) {
        return std::tie(a.tau, a.q1, a.q2, a.q3) < std::tie(b.tau, b.q1, b.q2, b.q3);
    });
    return GauntCOO(channels.l_max(), std::move(rows));
}

GauntCOO build_gaunt_coo(int l_max) { return build_gaunt_coo(ChannelTable(l_max)); }

std::vector<std::size_t> column_major_order(const GauntCOO& coo) {
    std::vector<std::size_t> perm(coo.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    const auto& r = coo.rows();
    std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
        return std::tie(r[a].q3, r[a].q2, r[a].q1) < std::tie(r[b].q3, r[b].q2, r[b].q1);
    });
    return perm;
}

}  // namespace boltzfact
