#include "qcp/phase_frame.hpp"

#include <algorithm>
#include <cmath>

namespace qcp {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInvSqrt2 = 0.7071067811865476;
constexpr Index kTileBytes = Index{1} << 20;
constexpr Index kBlock = 64;

cplx i_power(int d)
{
    switch (((d % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
    }
}

} // namespace

PhaseFrame::PhaseFrame(const ModelParams& p, double boundary_field)
    : p_(p), field_(boundary_field), probe_(p.h_x)
{
    p_.validate();
    N_ = p_.dim();
    for (int j = 0; j < p_.L; ++j) site_bits_.push_back(site_bit(p_.L, j));
    pop_.resize(static_cast<std::size_t>(N_));
    for (Index a = 0; a < N_; ++a) pop_[a] = popcount(static_cast<std::uint64_t>(a));
    off_sym_.resize(static_cast<std::size_t>(N_) + 1);
    off_anti_.resize(static_cast<std::size_t>(N_) + 1);
    off_sym_[0] = off_anti_[0] = 0;
    for (Index a = 0; a < N_; ++a) {
        off_sym_[a + 1] = off_sym_[a] + (N_ - a);
        off_anti_[a + 1] = off_anti_[a] + (N_ - a - 1);
    }
    build_generator();
}

void PhaseFrame::set_boundary_field(double f)
{
    if (f == field_) return;
    field_ = f;
    build_generator();
}

void PhaseFrame::set_probe(double h)
{
    if (h == probe_) return;
    probe_ = h;
    build_generator();
}

void PhaseFrame::build_generator()
{
    ModelParams bare = p_;
    bare.h_x = 0.0;
    const SparseOperator H = build_hamiltonian(bare, field_);
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(H.matrix().nonZeros() + N_ * p_.L));
    if (probe_ != 0.0)
        for (Index a = 0; a < N_; ++a)
            for (const std::uint64_t bit : site_bits_) {
                const auto b = static_cast<Index>(static_cast<std::uint64_t>(a) ^ bit);
                t.emplace_back(a, b, pop_[b] > pop_[a] ? probe_ : -probe_);
            }
    const auto& h = H.matrix();
    for (Index a = 0; a < h.outerSize(); ++a) {
        for (RowSparseXcd::InnerIterator it(h, a); it; ++it) {
            const Index b = it.col();
            if (it.value().imag() != 0.0 || std::abs(pop_[a] - pop_[b]) != 1)
                throw std::logic_error("PhaseFrame: Hamiltonian is not of real single-flip form");
            t.emplace_back(a, b, pop_[b] > pop_[a] ? it.value().real() : -it.value().real());
        }
    }
    K_.resize(N_, N_);
    K_.setFromTriplets(t.begin(), t.end());
    K_.makeCompressed();
}

Index PhaseFrame::sector_dim(Sector s) const
{
    return s == Sector::symmetric ? N_ * (N_ + 1) / 2 : N_ * (N_ - 1) / 2;
}

Index PhaseFrame::packed_index(Index a, Index b, Sector s) const
{
    return s == Sector::symmetric ? off_sym_[a] + (b - a) : off_anti_[a] + (b - a - 1);
}

void PhaseFrame::apply(const RowMatrixXd& r, RowMatrixXd& out, int sign) const
{
    const Index N = N_;
    if (r.rows() != N || r.cols() != N) throw std::invalid_argument("PhaseFrame::apply: dimension mismatch");
    kr_.resize(N, N);
    kr_.setZero();

    // K r, tiled over columns so the rows of r touched per tile stay in cache.
    const Index tile = std::clamp<Index>(kTileBytes / (8 * N), 16, N);
    for (Index c0 = 0; c0 < N; c0 += tile) {
        const Index w = std::min(tile, N - c0);
        for (Index a = 0; a < N; ++a) {
            double* o = kr_.data() + a * N + c0;
            for (RowSparseXd::InnerIterator it(K_, a); it; ++it) {
                const double v = it.value();
                const double* src = r.data() + it.col() * N + c0;
                for (Index q = 0; q < w; ++q) o[q] += v * src[q];
            }
        }
    }

    out.resize(N, N);
    const double s = sign;
    for (Index a0 = 0; a0 < N; a0 += kBlock)
        for (Index b0 = 0; b0 < N; b0 += kBlock) {
            const Index a1 = std::min(a0 + kBlock, N), b1 = std::min(b0 + kBlock, N);
            for (Index a = a0; a < a1; ++a)
                for (Index b = b0; b < b1; ++b) out(a, b) = kr_(a, b) + s * kr_(b, a);
        }

    const double g = p_.gamma;
    const auto full = static_cast<std::uint64_t>(N - 1);
    for (Index a = 0; a < N; ++a) {
        const double* ra = r.data() + a * N;
        double* oa = out.data() + a * N;
        const auto ua = static_cast<std::uint64_t>(a);
        for (Index b = 0; b < N; ++b) {
            const auto ub = static_cast<std::uint64_t>(b);
            double v = -0.5 * g * (pop_[a] + pop_[b]) * ra[b];
            std::uint64_t free = ~(ua | ub) & full;
            while (free) {
                const std::uint64_t bit = free & (~free + 1);
                v += g * r(static_cast<Index>(ua | bit), static_cast<Index>(ub | bit));
                free ^= bit;
            }
            oa[b] += v;
        }
    }
}

void PhaseFrame::apply_packed(const Eigen::VectorXd& x, Eigen::VectorXd& y, Sector s) const
{
    if (x.size() != sector_dim(s)) throw std::invalid_argument("PhaseFrame::apply_packed: dimension mismatch");
    r_work_ = unpack(x, s);
    apply(r_work_, out_work_, sector_sign(s));
    y = pack(out_work_, s);
}

Eigen::VectorXd PhaseFrame::pack(const RowMatrixXd& r, Sector s) const
{
    Eigen::VectorXd x(sector_dim(s));
    Index k = 0;
    for (Index a = 0; a < N_; ++a) {
        if (s == Sector::symmetric) x[k++] = r(a, a);
        const double* ra = r.data() + a * N_;
        for (Index b = a + 1; b < N_; ++b) x[k++] = kSqrt2 * ra[b];
    }
    return x;
}

RowMatrixXd PhaseFrame::unpack(const Eigen::VectorXd& x, Sector s) const
{
    if (x.size() != sector_dim(s)) throw std::invalid_argument("PhaseFrame::unpack: dimension mismatch");
    RowMatrixXd r(N_, N_);
    const double sgn = sector_sign(s);
    Index k = 0;
    for (Index a = 0; a < N_; ++a) {
        r(a, a) = s == Sector::symmetric ? x[k++] : 0.0;
        double* ra = r.data() + a * N_;
        for (Index b = a + 1; b < N_; ++b) ra[b] = kInvSqrt2 * x[k++];
    }
    for (Index a0 = 0; a0 < N_; a0 += kBlock)
        for (Index b0 = 0; b0 <= a0; b0 += kBlock) {
            const Index a1 = std::min(a0 + kBlock, N_), b1 = std::min(b0 + kBlock, N_);
            for (Index a = a0; a < a1; ++a)
                for (Index b = b0; b < std::min(b1, a); ++b) r(a, b) = sgn * r(b, a);
        }
    return r;
}

Eigen::SparseMatrix<double> PhaseFrame::sector_matrix(Sector s) const
{
    const double sgn = sector_sign(s);
    const double g = p_.gamma;
    const auto full = static_cast<std::uint64_t>(N_ - 1);
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(sector_dim(s)) * (2 * (K_.nonZeros() / N_ + 1) + p_.L + 1));

    // r_ab expressed through the packed coordinates.
    const auto add = [&](Index row, Index a, Index b, double coef) {
        if (a == b) {
            if (s == Sector::symmetric) t.emplace_back(row, packed_index(a, a, s), coef);
        } else if (a < b) {
            t.emplace_back(row, packed_index(a, b, s), coef * kInvSqrt2);
        } else {
            t.emplace_back(row, packed_index(b, a, s), sgn * coef * kInvSqrt2);
        }
    };

    for (Index a = 0; a < N_; ++a) {
        for (Index b = (s == Sector::symmetric ? a : a + 1); b < N_; ++b) {
            const Index row = packed_index(a, b, s);
            const double scale = a == b ? 1.0 : kSqrt2;
            for (RowSparseXd::InnerIterator it(K_, a); it; ++it) add(row, it.col(), b, scale * it.value());
            for (RowSparseXd::InnerIterator it(K_, b); it; ++it) add(row, it.col(), a, scale * sgn * it.value());
            add(row, a, b, -scale * 0.5 * g * (pop_[a] + pop_[b]));
            std::uint64_t free = ~(static_cast<std::uint64_t>(a) | static_cast<std::uint64_t>(b)) & full;
            while (free) {
                const std::uint64_t bit = free & (~free + 1);
                add(row, static_cast<Index>(a | bit), static_cast<Index>(b | bit), scale * g);
                free ^= bit;
            }
        }
    }
    Eigen::SparseMatrix<double> m(sector_dim(s), sector_dim(s));
    m.setFromTriplets(t.begin(), t.end());
    m.prune(0.0);
    m.makeCompressed();
    return m;
}

Eigen::VectorXd PhaseFrame::trace_functional() const
{
    Eigen::VectorXd t = Eigen::VectorXd::Zero(sector_dim(Sector::symmetric));
    for (Index a = 0; a < N_; ++a) t[off_sym_[a]] = 1.0;
    return t;
}

Eigen::MatrixXcd PhaseFrame::to_density(const RowMatrixXd& r_sym, const RowMatrixXd& r_anti) const
{
    Eigen::MatrixXcd rho(N_, N_);
    const bool has_sym = r_sym.size() > 0, has_anti = r_anti.size() > 0;
    for (Index a = 0; a < N_; ++a)
        for (Index b = 0; b < N_; ++b) {
            const cplx v(has_sym ? r_sym(a, b) : 0.0, has_anti ? r_anti(a, b) : 0.0);
            rho(a, b) = i_power(pop_[a] - pop_[b]) * v;
        }
    return rho;
}

void PhaseFrame::from_density(const Eigen::MatrixXcd& rho, RowMatrixXd& r_sym, RowMatrixXd& r_anti) const
{
    if (rho.rows() != N_ || rho.cols() != N_) throw std::invalid_argument("PhaseFrame::from_density: dimension mismatch");
    r_sym.resize(N_, N_);
    r_anti.resize(N_, N_);
    for (Index a = 0; a < N_; ++a)
        for (Index b = 0; b < N_; ++b) {
            const cplx v = i_power(pop_[b] - pop_[a]) * rho(a, b);
            r_sym(a, b) = v.real();
            r_anti(a, b) = v.imag();
        }
    // Symmetrize away rounding so the two parts lie exactly in their sectors.
    r_sym = (0.5 * (r_sym + r_sym.transpose())).eval();
    r_anti = (0.5 * (r_anti - r_anti.transpose())).eval();
}

double PhaseFrame::population(const RowMatrixXd& r, int site) const
{
    const std::uint64_t bit = site_bits_.at(static_cast<std::size_t>(site));
    double n = 0.0;
    for (Index a = 0; a < N_; ++a)
        if (static_cast<std::uint64_t>(a) & bit) n += r(a, a);
    return n;
}

double PhaseFrame::mean_population(const RowMatrixXd& r) const
{
    double n = 0.0;
    for (Index a = 0; a < N_; ++a) n += pop_[a] * r(a, a);
    return n / p_.L;
}

double PhaseFrame::sigma_y_total(const RowMatrixXd& r) const
{
    double s = 0.0;
    for (const std::uint64_t bit : site_bits_)
        for (Index a = 0; a < N_; ++a)
            if (!(static_cast<std::uint64_t>(a) & bit)) s -= r(a, static_cast<Index>(a | bit)) + r(static_cast<Index>(a | bit), a);
    return s;
}

double PhaseFrame::packed_population(const Eigen::VectorXd& x, int site) const
{
    const std::uint64_t bit = site_bits_.at(static_cast<std::size_t>(site));
    double n = 0.0;
    for (Index a = 0; a < N_; ++a)
        if (static_cast<std::uint64_t>(a) & bit) n += x[off_sym_[a]];
    return n;
}

double PhaseFrame::packed_mean_population(const Eigen::VectorXd& x) const
{
    double n = 0.0;
    for (Index a = 0; a < N_; ++a) n += pop_[a] * x[off_sym_[a]];
    return n / p_.L;
}

double PhaseFrame::packed_trace(const Eigen::VectorXd& x) const
{
    double t = 0.0;
    for (Index a = 0; a < N_; ++a) t += x[off_sym_[a]];
    return t;
}

double PhaseFrame::packed_sigma_y_total(const Eigen::VectorXd& x) const
{
    double s = 0.0;
    for (const std::uint64_t bit : site_bits_)
        for (Index a = 0; a < N_; ++a)
            if (!(static_cast<std::uint64_t>(a) & bit))
                s -= kSqrt2 * x[packed_index(a, static_cast<Index>(a | bit), Sector::symmetric)];
    return s;
}

} // namespace qcp
