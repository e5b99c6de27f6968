#include "boltzfact/contraction.hpp"

#include "boltzfact/error.hpp"

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <map>
#include <string>
#include <tuple>

namespace boltzfact {

namespace {

using Clock = std::chrono::steady_clock;

// f transposed to [q][k] so the radial index is contiguous.
std::vector<double> transpose(const CoefficientField& c) {
    const int nk = c.n_k(), nq = c.n_q();
    std::vector<double> t(static_cast<std::size_t>(nk) * nq);
    for (int k = 0; k < nk; ++k)
        for (int q = 0; q < nq; ++q) t[static_cast<std::size_t>(q) * nk + k] = c(k, q);
    return t;
}

void check_shape(const SpectralConfig& cfg, const CoefficientField& c) {
    if (c.n_k() != cfg.n_k() || c.n_q() != cfg.n_q())
        throw ContractViolation("coefficient field does not match the operator truncation");
}

struct Timer {
    FlopCounter* counter;
    Clock::time_point start = Clock::now();
    ~Timer() {
        if (counter) counter->seconds += std::chrono::duration<double>(Clock::now() - start).count();
    }
};

}  // namespace

FactorizedOperator::FactorizedOperator(SpectralConfig cfg, ChannelTable channels, GauntCOO coo, RTensor r)
    : cfg_(cfg), channels_(std::move(channels)), coo_(std::move(coo)), r_(std::move(r)) {
    if (channels_.l_max() != cfg_.l_max() || coo_.l_max() != cfg_.l_max())
        throw ContractViolation("operator components disagree on l_max");
    if (r_.n_k() != cfg_.n_k() || r_.n_t() != channels_.size())
        throw ContractViolation("R tensor shape does not match the truncation");
    const auto nq = static_cast<std::uint32_t>(cfg_.n_q());
    std::map<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>, std::uint32_t> keys;
    row_psi_.reserve(coo_.size());
    for (const GauntEntry& e : coo_.rows()) {
        if (e.tau >= static_cast<std::uint32_t>(channels_.size()) || e.q1 >= nq || e.q2 >= nq || e.q3 >= nq)
            throw ContractViolation("COO row index out of range");
        const Channel& ch = channels_[static_cast<int>(e.tau)];
        if (angular_lm(static_cast<int>(e.q1)).l != ch.l1 || angular_lm(static_cast<int>(e.q2)).l != ch.l2 ||
            angular_lm(static_cast<int>(e.q3)).l != ch.l3)
            throw ContractViolation("COO row degrees disagree with its channel");
        auto [it, inserted] = keys.try_emplace({e.q2, e.q3, e.tau}, static_cast<std::uint32_t>(psi_keys_.size()));
        if (inserted) psi_keys_.push_back({e.q2, e.q3, e.tau});
        row_psi_.push_back(it->second);
    }
    if (coo_.slice_sorted() && coo_.n_slices() > coo_.size()) throw ContractViolation("N_S exceeds N_G");
}

FactorizedOperator build_operator(const SpectralConfig& cfg, const GridSpec& grid, const BuildOptions& opts) {
    ChannelTable channels(cfg.l_max());
    GauntCOO coo = build_gaunt_coo(channels);
    AssemblyOptions ao;
    ao.threads = opts.threads;
    RTensor r = assemble_r_tensor(cfg, grid, channels, ao);
    if (opts.conservation) apply_conservation(r, channels);
    if (opts.detailed_balance) apply_detailed_balance(r, channels);
    return FactorizedOperator(cfg, std::move(channels), std::move(coo), std::move(r));
}

std::uint64_t available_memory_bytes() {
    const long pages = sysconf(_SC_AVPHYS_PAGES);
    const long page = sysconf(_SC_PAGESIZE);
    if (pages <= 0 || page <= 0) return UINT64_MAX;
    return static_cast<std::uint64_t>(pages) * static_cast<std::uint64_t>(page);
}

DenseOperator assemble_dense(const FactorizedOperator& op, const DenseLimits& limits) {
    const SpectralConfig& cfg = op.config();
    const int n = cfg.n_dof();
    if (n > limits.max_dof)
        throw CapacityError("dense tensor with n_dof = " + std::to_string(n) + " exceeds the guard of " +
                            std::to_string(limits.max_dof));
    const std::uint64_t bytes = static_cast<std::uint64_t>(n) * n * n * sizeof(double);
    if (limits.check_memory && bytes > available_memory_bytes())
        throw CapacityError("dense tensor needs " + std::to_string(bytes) + " bytes, more than available memory");
    DenseOperator D;
    D.n_dof = n;
    D.c.assign(static_cast<std::size_t>(n) * n * n, 0.0);
    const int nk = cfg.n_k(), nq = cfg.n_q();
    const RTensor& R = op.r();
    for (const GauntEntry& e : op.coo().rows())
        for (int k1 = 0; k1 < nk; ++k1)
            for (int k2 = 0; k2 < nk; ++k2)
                for (int k3 = 0; k3 < nk; ++k3) {
                    const std::size_t a1 = static_cast<std::size_t>(k1) * nq + e.q1;
                    const std::size_t a2 = static_cast<std::size_t>(k2) * nq + e.q2;
                    const std::size_t a3 = static_cast<std::size_t>(k3) * nq + e.q3;
                    D.c[(a1 * n + a2) * n + a3] += e.g * R(k1, k2, k3, static_cast<int>(e.tau));
                }
    return D;
}

CoefficientField q_dense(const DenseOperator& C, const CoefficientField& c, FlopCounter* counter) {
    const int n = C.n_dof;
    if (static_cast<int>(c.size()) != n) throw ContractViolation("dense operator and field sizes differ");
    Timer timer{counter};
    CoefficientField out(c.config());
    auto f = c.values();
    auto q = out.values();
    for (int a1 = 0; a1 < n; ++a1) {
        double acc = 0.0;
        const double* slab = C.c.data() + static_cast<std::size_t>(a1) * n * n;
        for (int a2 = 0; a2 < n; ++a2) {
            const double* row = slab + static_cast<std::size_t>(a2) * n;
            double inner = 0.0;
            for (int a3 = 0; a3 < n; ++a3) inner += row[a3] * f[a3];
            acc += f[a2] * inner;
        }
        q[a1] = acc;
    }
    if (counter) {
        const auto nn = static_cast<std::uint64_t>(n);
        counter->macs += nn * nn * nn + nn * nn;
        counter->bytes += nn * nn * nn * sizeof(double);
    }
    return out;
}

CoefficientField q_naive(const FactorizedOperator& op, const CoefficientField& c, FlopCounter* counter) {
    check_shape(op.config(), c);
    Timer timer{counter};
    const int nk = op.config().n_k();
    const std::vector<double> ft = transpose(c);
    CoefficientField out(c.config());
    const RTensor& R = op.r();
    for (const GauntEntry& e : op.coo().rows()) {
        const double* f2 = ft.data() + static_cast<std::size_t>(e.q2) * nk;
        const double* f3 = ft.data() + static_cast<std::size_t>(e.q3) * nk;
        const double* blk = R.block(static_cast<int>(e.tau)).data();
        for (int k1 = 0; k1 < nk; ++k1) {
            double acc = 0.0;
            for (int k2 = 0; k2 < nk; ++k2) {
                const double* row = blk + (static_cast<std::size_t>(k1) * nk + k2) * nk;
                for (int k3 = 0; k3 < nk; ++k3) acc += row[k3] * f2[k2] * f3[k3];
            }
            out(k1, static_cast<int>(e.q1)) += e.g * acc;
        }
    }
    if (counter) {
        const auto n = static_cast<std::uint64_t>(nk);
        counter->macs += op.coo().size() * (n * n * n + n);
        counter->bytes += op.coo().size() * (n * n * n * sizeof(double) + 24);
    }
    return out;
}

CoefficientField q_radial_first(const FactorizedOperator& op, const CoefficientField& c, FlopCounter* counter) {
    check_shape(op.config(), c);
    Timer timer{counter};
    const int nk = op.config().n_k();
    const std::vector<double> ft = transpose(c);
    const RTensor& R = op.r();
    const auto& keys = op.psi_keys();
    // Psi^{k1}_{q2,q3,tau} = sum R[k1,k2,k3,tau] f[k2,q2] f[k3,q3]
    std::vector<double> psi(keys.size() * nk);
    std::vector<double> tmp(nk);
    for (std::size_t i = 0; i < keys.size(); ++i) {
        const double* f2 = ft.data() + static_cast<std::size_t>(keys[i].q2) * nk;
        const double* f3 = ft.data() + static_cast<std::size_t>(keys[i].q3) * nk;
        const double* blk = R.block(static_cast<int>(keys[i].tau)).data();
        for (int k1 = 0; k1 < nk; ++k1) {
            double acc = 0.0;
            for (int k2 = 0; k2 < nk; ++k2) {
                const double* row = blk + (static_cast<std::size_t>(k1) * nk + k2) * nk;
                double inner = 0.0;
                for (int k3 = 0; k3 < nk; ++k3) inner += row[k3] * f3[k3];
                acc += f2[k2] * inner;
            }
            psi[i * nk + k1] = acc;
        }
    }
    CoefficientField out(c.config());
    const auto& rows = op.coo().rows();
    const auto& rp = op.row_psi();
    for (std::size_t z = 0; z < rows.size(); ++z) {
        const double* p = psi.data() + static_cast<std::size_t>(rp[z]) * nk;
        for (int k1 = 0; k1 < nk; ++k1) out(k1, static_cast<int>(rows[z].q1)) += rows[z].g * p[k1];
    }
    if (counter) {
        const auto n = static_cast<std::uint64_t>(nk);
        counter->macs += keys.size() * (n * n * n + n * n) + rows.size() * n;
        counter->bytes += keys.size() * n * n * n * sizeof(double) + rows.size() * (n * sizeof(double) + 24);
    }
    return out;
}

namespace {


void angular_first_kernel(const FactorizedOperator& op, const std::vector<double>& fa,
                          const std::vector<double>& fb, CoefficientField& out) {
    const int nk = op.config().n_k();
    const std::size_t nk2 = static_cast<std::size_t>(nk) * nk;
    const auto& rows = op.coo().rows();
    std::vector<double> phi(nk2);
    for (const GauntSlice& s : op.coo().slices()) {
        std::fill(phi.begin(), phi.end(), 0.0);
        for (std::uint32_t z = s.begin; z < s.end; ++z) {
            const GauntEntry& e = rows[z];
            const double* f2 = fa.data() + static_cast<std::size_t>(e.q2) * nk;
            const double* f3 = fb.data() + static_cast<std::size_t>(e.q3) * nk;
            for (int k2 = 0; k2 < nk; ++k2) {
                const double gf = e.g * f2[k2];
                double* prow = phi.data() + static_cast<std::size_t>(k2) * nk;
                for (int k3 = 0; k3 < nk; ++k3) prow[k3] += gf * f3[k3];
            }
        }
        const double* blk = op.r().block(static_cast<int>(s.tau)).data();
        for (int k1 = 0; k1 < nk; ++k1) {
            const double* rk = blk + static_cast<std::size_t>(k1) * nk2;
            double acc = 0.0;
            for (std::size_t j = 0; j < nk2; ++j) acc += rk[j] * phi[j];
            out(k1, static_cast<int>(s.q1)) += acc;
        }
    }
}

}  // namespace

CoefficientField q_angular_first(const FactorizedOperator& op, const CoefficientField& c, FlopCounter* counter) {
    check_shape(op.config(), c);
    if (!op.coo().slice_sorted()) throw ContractViolation("angular-first contraction needs COO rows grouped by (tau, q1)");
    Timer timer{counter};
    const std::vector<double> ft = transpose(c);
    CoefficientField out(c.config());
    angular_first_kernel(op, ft, ft, out);
    if (counter) {
        const auto n = static_cast<std::uint64_t>(op.config().n_k());
        counter->macs += op.coo().size() * n * n + op.n_slices() * n * n * n;
        counter->bytes += op.coo().size() * 24 + op.n_slices() * n * n * n * sizeof(double);
    }
    return out;
}

CoefficientField q_bilinear(const FactorizedOperator& op, const CoefficientField& a, const CoefficientField& b) {
    check_shape(op.config(), a);
    check_shape(op.config(), b);
    if (!op.coo().slice_sorted()) throw ContractViolation("angular-first contraction needs COO rows grouped by (tau, q1)");
    CoefficientField out(a.config());
    angular_first_kernel(op, transpose(a), transpose(b), out);
    return out;
}

std::string_view strategy_name(Strategy s) {
    switch (s) {
        case Strategy::Dense: return "dense";
        case Strategy::Naive: return "naive";
        case Strategy::RadialFirst: return "radial-first";
        case Strategy::AngularFirst: return "angular-first";
    }
    return "unknown";
}

Strategy parse_strategy(std::string_view name) {
    if (name == "dense") return Strategy::Dense;
    if (name == "naive") return Strategy::Naive;
    if (name == "radial" || name == "radial-first") return Strategy::RadialFirst;
    if (name == "angular" || name == "angular-first") return Strategy::AngularFirst;
    throw ConfigurationError("unknown contraction strategy '" + std::string(name) + "'");
}

Eigen::MatrixXd linearize(const FactorizedOperator& op, const CoefficientField& c) {
    check_shape(op.config(), c);
    const int nk = op.config().n_k(), nq = op.config().n_q(), n = op.config().n_dof();
    const std::vector<double> ft = transpose(c);
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (const GauntEntry& e : op.coo().rows()) {
        const double* f2 = ft.data() + static_cast<std::size_t>(e.q2) * nk;
        const double* f3 = ft.data() + static_cast<std::size_t>(e.q3) * nk;
        const double* blk = op.r().block(static_cast<int>(e.tau)).data();
        for (int k1 = 0; k1 < nk; ++k1) {
            const int a1 = k1 * nq + static_cast<int>(e.q1);
            for (int k2 = 0; k2 < nk; ++k2) {
                const double* row = blk + (static_cast<std::size_t>(k1) * nk + k2) * nk;
                double d2 = 0.0;
                for (int k3 = 0; k3 < nk; ++k3) {
                    d2 += row[k3] * f3[k3];
                    // derivative with respect to slot 3
                    J(a1, k3 * nq + static_cast<int>(e.q3)) += e.g * row[k3] * f2[k2];
                }
                J(a1, k2 * nq + static_cast<int>(e.q2)) += e.g * d2;
            }
        }
    }
    return J;
}

MemoryFootprint memory_footprint(const SpectralConfig& cfg, std::uint64_t n_t, std::uint64_t n_g) {
    MemoryFootprint m;
    m.n_dof = cfg.n_dof();
    const auto n = static_cast<std::uint64_t>(m.n_dof);
    const auto nk = static_cast<std::uint64_t>(cfg.n_k());
    m.dense_elements = n * n * n;
    m.dense_bytes = m.dense_elements * sizeof(double);
    m.factorized_elements = nk * nk * nk * n_t + 5 * n_g;
    // a row needs q1, q2, q3 and g; tau follows from the three degrees
    m.factorized_bytes = nk * nk * nk * n_t * sizeof(double) + n_g * (3 * sizeof(std::uint32_t) + sizeof(double));
    m.ratio = static_cast<double>(m.factorized_bytes) / static_cast<double>(m.dense_bytes);
    return m;
}

}  // namespace boltzfact
