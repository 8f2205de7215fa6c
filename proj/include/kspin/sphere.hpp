#pragma once

#include "bounds.hpp"
#include "error.hpp"
#include "fiber.hpp"
#include "matrix.hpp"
#include "report.hpp"
#include "twistor.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

// Round unit sphere S² = CP¹ with the frame e1 = ∂θ, e2 = ∂φ / sin θ and Je1 = e2.
namespace kspin::sphere {

inline constexpr double scalar_curvature = 2.0;

struct GaussRule {
    std::vector<double> x;
    std::vector<double> w;
};

// Gauss–Legendre nodes and weights on [-1, 1] from the Jacobi matrix eigenproblem.
inline GaussRule gauss_legendre(int q)
{
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(q, q);
    for (int k = 1; k < q; ++k) {
        const double b = k / std::sqrt(4.0 * k * k - 1.0);
        jac(k, k - 1) = b;
        jac(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
    GaussRule g;
    for (int k = 0; k < q; ++k) {
        g.x.push_back(es.eigenvalues()(k));
        const double v = es.eigenvectors()(0, k);
        g.w.push_back(2.0 * v * v);
    }
    return g;
}

// P_0..P_n^{(a,b)}(x) by the standard three-term recurrence.
inline std::vector<double> jacobi_values(int n, double a, double b, double x)
{
    std::vector<double> p(n + 1, 0.0);
    p[0] = 1.0;
    if (n == 0) return p;
    p[1] = 0.5 * (a - b + (a + b + 2.0) * x);
    for (int k = 2; k <= n; ++k) {
        const double s = 2.0 * k + a + b;
        const double c1 = 2.0 * k * (k + a + b) * (s - 2.0);
        const double c2 = (s - 1.0) * (a * a - b * b);
        const double c3 = (s - 2.0) * (s - 1.0) * s;
        const double c4 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * s;
        p[k] = ((c2 + c3 * x) * p[k - 1] - c4 * p[k - 2]) / c1;
    }
    return p;
}

// ∫ (1-x)^a (1+x)^b (P_n^{(a,b)})² dx.
inline double jacobi_norm2(int n, double a, double b)
{
    return std::exp((a + b + 1.0) * std::log(2.0) - std::log(2.0 * n + a + b + 1.0) + std::lgamma(n + a + 1.0) + std::lgamma(n + b + 1.0) -
                    std::lgamma(n + a + b + 1.0) - std::lgamma(n + 1.0));
}

// Spinor components e^{iμφ} f(θ); component c uses sin^a(θ/2) cos^b(θ/2) P_n^{(a,b)}(cos θ).
struct ModeBlock {
    double mu = 0.5;
    int count = 0;  // n = 0..count-1 per component
    int a[2] = {0, 0};
    int b[2] = {0, 0};

    int dim() const { return 2 * count; }
};

struct BasisSample {
    double value = 0.0;
    double dtheta = 0.0;
};

class SphereSpinorBasis {
public:
    explicit SphereSpinorBasis(int order) : order_(order)
    {
        if (order < 2 || order > 64) throw domain_error("sphere truncation order must lie in [2, 64]");
        rule_ = gauss_legendre(2 * order + 12);
        for (int twice = -(2 * order - 1); twice <= 2 * order - 1; twice += 2) {
            ModeBlock blk;
            blk.mu = twice / 2.0;
            const int am = std::abs(twice - 1) / 2;
            const int ap = std::abs(twice + 1) / 2;
            blk.a[0] = am;
            blk.b[0] = ap;
            blk.a[1] = ap;
            blk.b[1] = am;
            blk.count = order - (std::abs(twice) - 1) / 2;
            blocks_.push_back(blk);
        }
    }

    int order() const { return order_; }
    const GaussRule& rule() const { return rule_; }
    const std::vector<ModeBlock>& blocks() const { return blocks_; }

    std::size_t dim() const
    {
        std::size_t d = 0;
        for (const auto& b : blocks_) d += b.dim();
        return d;
    }

    // Orthonormal basis functions of one component at cos θ = x.
    std::vector<BasisSample> sample(const ModeBlock& blk, int comp, double x) const
    {
        const double a = blk.a[comp], b = blk.b[comp];
        const int n = blk.count - 1;
        const auto p = jacobi_values(n, a, b, x);
        const auto dp = n > 0 ? jacobi_values(n - 1, a + 1.0, b + 1.0, x) : std::vector<double>{};
        const double s = std::sqrt(0.5 * (1.0 - x));
        const double c = std::sqrt(0.5 * (1.0 + x));
        const double sin_t = 2.0 * s * c;
        const double w = std::pow(s, a) * std::pow(c, b);
        const double log_ratio = (a > 0 ? 0.5 * a * c / s : 0.0) - (b > 0 ? 0.5 * b * s / c : 0.0);
        std::vector<BasisSample> out(blk.count);
        for (int k = 0; k <= n; ++k) {
            const double nrm = 1.0 / std::sqrt(jacobi_norm2(k, a, b) / std::pow(2.0, a + b));
            const double deriv = k > 0 ? 0.5 * (k + a + b + 1.0) * dp[k - 1] : 0.0;
            out[k].value = nrm * w * p[k];
            out[k].dtheta = nrm * (w * p[k] * log_ratio - w * deriv * sin_t);
        }
        return out;
    }

private:
    int order_;
    GaussRule rule_;
    std::vector<ModeBlock> blocks_;
};

inline SphereSpinorBasis build_sphere(int order) { return SphereSpinorBasis(order); }

// Pointwise fiber data for m = 1.
struct FiberData {
    Eigen::Matrix2cd c1, c2, omega, volume, rho;

    FiberData()
    {
        const FiberContext<Complex> ctx(1);
        c1 = to_eigen(ctx.gamma_matrix(0));
        c2 = to_eigen(ctx.gamma_matrix(1));
        omega = to_eigen(omega_matrix(ctx));
        volume = to_eigen(volume_matrix(ctx));
        rho = to_eigen(form_matrix(ctx, ricci_form(ctx, RicciModel::einstein(1, Rational(2)))));
    }
};

inline const FiberData& fiber_data()
{
    static const FiberData data;
    return data;
}

// Spinor and its frame derivatives at a point: ∇_{e1} = ∂θ, ∇_{e2} = (∂φ + ½ cos θ e1·e2·) / sin θ.
struct PointJet {
    Eigen::Vector2cd value = Eigen::Vector2cd::Zero();
    Eigen::Vector2cd dtheta = Eigen::Vector2cd::Zero();
    Eigen::Vector2cd dphi = Eigen::Vector2cd::Zero();

    Eigen::Vector2cd nabla1() const { return dtheta; }

    Eigen::Vector2cd nabla2(double theta) const
    {
        const auto& f = fiber_data();
        return (dphi + 0.5 * std::cos(theta) * (f.c1 * (f.c2 * value))) / std::sin(theta);
    }

    Eigen::Vector2cd dirac(double theta) const
    {
        const auto& f = fiber_data();
        return f.c1 * nabla1() + f.c2 * nabla2(theta);
    }
};

// Coefficients per mode block, ordered (component 0 n = 0.., component 1 n = 0..).
struct SphereSpinor {
    std::vector<Eigen::VectorXcd> blocks;
};

inline PointJet evaluate(const SphereSpinorBasis& basis, const SphereSpinor& psi, double theta, double phi)
{
    PointJet jet;
    const double x = std::cos(theta);
    const Complex i(0.0, 1.0);
    for (std::size_t bi = 0; bi < basis.blocks().size(); ++bi) {
        const auto& blk = basis.blocks()[bi];
        const auto& coef = psi.blocks[bi];
        if (coef.size() == 0 || coef.cwiseAbs().maxCoeff() == 0.0) continue;
        const Complex phase = std::exp(i * blk.mu * phi);
        for (int comp = 0; comp < 2; ++comp) {
            const auto smp = basis.sample(blk, comp, x);
            for (int k = 0; k < blk.count; ++k) {
                const Complex cf = coef(comp * blk.count + k) * phase;
                jet.value(comp) += cf * smp[k].value;
                jet.dtheta(comp) += cf * smp[k].dtheta;
                jet.dphi(comp) += i * blk.mu * cf * smp[k].value;
            }
        }
    }
    return jet;
}

// Galerkin matrices of a pointwise operator built from the frame jets, per mode block.
struct SphereOperator {
    std::vector<Eigen::MatrixXcd> blocks;

    double hermiticity_defect() const
    {
        double d = 0.0;
        for (const auto& b : blocks) d = std::max(d, (b - b.adjoint()).cwiseAbs().maxCoeff());
        return d;
    }

    SphereSpinor apply(const SphereSpinor& psi) const
    {
        SphereSpinor out;
        for (std::size_t i = 0; i < blocks.size(); ++i) out.blocks.push_back(blocks[i] * psi.blocks[i]);
        return out;
    }
};

enum class PointOp { dirac, omega, volume, gram };

inline SphereOperator assemble(const SphereSpinorBasis& basis, PointOp op)
{
    const auto& f = fiber_data();
    const auto& rule = basis.rule();
    const Complex i(0.0, 1.0);
    SphereOperator out;
    for (const auto& blk : basis.blocks()) {
        const int d = blk.dim();
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
        for (std::size_t q = 0; q < rule.x.size(); ++q) {
            const double x = rule.x[q];
            const double theta = std::acos(x);
            std::vector<PointJet> jets(d);
            for (int comp = 0; comp < 2; ++comp) {
                const auto smp = basis.sample(blk, comp, x);
                for (int k = 0; k < blk.count; ++k) {
                    auto& j = jets[comp * blk.count + k];
                    j.value(comp) = smp[k].value;
                    j.dtheta(comp) = smp[k].dtheta;
                    j.dphi(comp) = i * blk.mu * smp[k].value;
                }
            }
            std::vector<Eigen::Vector2cd> image(d);
            for (int c = 0; c < d; ++c) {
                switch (op) {
                case PointOp::dirac: image[c] = jets[c].dirac(theta); break;
                case PointOp::omega: image[c] = f.omega * jets[c].value; break;
                case PointOp::volume: image[c] = f.volume * jets[c].value; break;
                case PointOp::gram: image[c] = jets[c].value; break;
                }
            }
            for (int r = 0; r < d; ++r)
                for (int c = 0; c < d; ++c) m(r, c) += rule.w[q] * jets[r].value.dot(image[c]);
        }
        out.blocks.push_back(std::move(m));
    }
    return out;
}

struct SpectralLevel {
    double value = 0.0;
    long rounded = 0;
    int multiplicity = 0;
};

struct Eigenpair {
    double value = 0.0;
    std::size_t block = 0;
    Eigen::VectorXcd vector;
};

struct SphereSpectrum {
    int order = 0;
    std::vector<Eigenpair> pairs;       // ascending
    std::vector<SpectralLevel> levels;  // clustered, ascending
    double hermiticity_defect = 0.0;
    double gram_defect = 0.0;
    double chirality_defect = 0.0;  // ‖ω D + D ω‖
    double omega_defect = 0.0;      // distance of Ω eigenvalues from {±i}
    SphereOperator dirac;

    // Levels strictly inside the trusted part of the truncation.
    std::vector<SpectralLevel> interior() const
    {
        std::vector<SpectralLevel> out;
        const double cut = 0.8 * order;
        for (const auto& l : levels)
            if (std::abs(l.value) <= cut) out.push_back(l);
        return out;
    }

    double min_square() const
    {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& p : pairs) best = std::min(best, p.value * p.value);
        return best;
    }
};

inline std::vector<SpectralLevel> cluster(std::vector<double> values, double tol = 1e-6)
{
    std::sort(values.begin(), values.end());
    std::vector<SpectralLevel> out;
    for (double v : values) {
        if (!out.empty() && std::abs(v - out.back().value) <= tol) {
            auto& l = out.back();
            l.value = (l.value * l.multiplicity + v) / (l.multiplicity + 1);
            ++l.multiplicity;
        } else
            out.push_back({v, 0, 1});
    }
    for (auto& l : out) l.rounded = std::lround(l.value);
    return out;
}

inline SphereSpectrum dirac_spectrum(const SphereSpinorBasis& basis)
{
    SphereSpectrum sp;
    sp.order = basis.order();
    sp.dirac = assemble(basis, PointOp::dirac);
    sp.hermiticity_defect = sp.dirac.hermiticity_defect();
    const auto gram = assemble(basis, PointOp::gram);
    const auto omega = assemble(basis, PointOp::omega);
    const auto vol = assemble(basis, PointOp::volume);
    std::vector<double> values;
    for (std::size_t b = 0; b < sp.dirac.blocks.size(); ++b) {
        const auto& h = sp.dirac.blocks[b];
        const auto id = Eigen::MatrixXcd::Identity(h.rows(), h.cols());
        sp.gram_defect = std::max(sp.gram_defect, (gram.blocks[b] - id).cwiseAbs().maxCoeff());
        sp.chirality_defect = std::max(sp.chirality_defect, (vol.blocks[b] * h + h * vol.blocks[b]).cwiseAbs().maxCoeff());
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> oes(omega.blocks[b]);
        for (int k = 0; k < oes.eigenvalues().size(); ++k) {
            const Complex z = oes.eigenvalues()(k);
            sp.omega_defect = std::max(sp.omega_defect, std::min(std::abs(z - Complex(0, 1)), std::abs(z + Complex(0, 1))));
        }
        const Eigen::MatrixXcd sym = 0.5 * (h + h.adjoint());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sym);
        for (int k = 0; k < es.eigenvalues().size(); ++k) {
            sp.pairs.push_back({es.eigenvalues()(k), b, es.eigenvectors().col(k)});
            values.push_back(es.eigenvalues()(k));
        }
    }
    std::stable_sort(sp.pairs.begin(), sp.pairs.end(), [](const Eigenpair& a, const Eigenpair& b) { return a.value < b.value; });
    sp.levels = cluster(values);
    return sp;
}

inline SphereSpectrum dirac_spectrum(int order) { return dirac_spectrum(build_sphere(order)); }

// Chebyshev points x_j = cos(πj/N) and the differentiation matrix.
inline std::pair<Eigen::VectorXd, Eigen::MatrixXd> chebyshev(int n)
{
    Eigen::VectorXd x(n + 1);
    for (int j = 0; j <= n; ++j) x(j) = std::cos(std::numbers::pi * j / n);
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n + 1, n + 1);
    auto weight = [&](int j) { return (j == 0 || j == n ? 2.0 : 1.0) * (j % 2 == 0 ? 1.0 : -1.0); };
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j)
            if (i != j) d(i, j) = weight(i) / weight(j) / (x(i) - x(j));
    for (int i = 0; i <= n; ++i) d(i, i) = -d.row(i).sum();
    return {x, d};
}

// Collocation of D on f_c = sin^{a_c}(θ/2) cos^{b_c}(θ/2) p_c(cos θ) with polynomial unknowns p_0, p_1 of degree ≤ n.
inline std::vector<double> collocation_block(double mu, int n)
{
    const double nu = std::abs(mu) + 0.5;
    if (n == 0) {
        // Constant unknowns: the derivative terms vanish.
        return {-nu, nu};
    }
    const auto [x, d] = chebyshev(n);
    const int k = n + 1;
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(k, k);
    Eigen::MatrixXd one_minus = Eigen::MatrixXd::Zero(k, k), one_plus = Eigen::MatrixXd::Zero(k, k);
    for (int j = 0; j < k; ++j) {
        one_minus(j, j) = 1.0 - x(j);
        one_plus(j, j) = 1.0 + x(j);
    }
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2 * k, 2 * k);
    if (mu > 0) {
        m.block(0, k, k, k) = -nu * id + one_minus * d;
        m.block(k, 0, k, k) = -nu * id - one_plus * d;
    } else {
        m.block(0, k, k, k) = nu * id + one_plus * d;
        m.block(k, 0, k, k) = nu * id - one_minus * d;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
    std::vector<double> out;
    for (int j = 0; j < es.eigenvalues().size(); ++j) out.push_back(es.eigenvalues()(j).real());
    return out;
}

// Oracle spectrum over the same triangular truncation, each block refined by `extra` degrees.
inline std::vector<double> collocation_spectrum(int order, int extra = 0)
{
    std::vector<double> all;
    for (int twice = -(2 * order - 1); twice <= 2 * order - 1; twice += 2) {
        const double mu = twice / 2.0;
        const int count = order - (std::abs(twice) - 1) / 2;
        auto ev = collocation_block(mu, count - 1 + extra);
        std::sort(ev.begin(), ev.end(), [](double a, double b) { return std::abs(a) < std::abs(b) || (std::abs(a) == std::abs(b) && a < b); });
        ev.resize(std::min<std::size_t>(ev.size(), 2 * count));
        all.insert(all.end(), ev.begin(), ev.end());
    }
    std::sort(all.begin(), all.end());
    return all;
}

struct KillingReport {
    double lambda = 1.0;
    int dimension = 0;
    double residual = 0.0;          // sup of ∇_Xφ₀ + ½X^-·φ₁ and ∇_Xφ₁ + ½X^+·φ₀
    double opposite_residual = 0.0;  // same equations on the λ = -λ eigenspace
    std::vector<SphereSpinor> basis;
};

inline std::vector<SphereSpinor> eigenspace(const SphereSpinorBasis& basis, const SphereSpectrum& sp, double lambda, double tol = 1e-6)
{
    std::vector<SphereSpinor> out;
    for (const auto& p : sp.pairs) {
        if (std::abs(p.value - lambda) > tol) continue;
        SphereSpinor s;
        for (std::size_t b = 0; b < basis.blocks().size(); ++b)
            s.blocks.push_back(b == p.block ? p.vector : Eigen::VectorXcd::Zero(basis.blocks()[b].dim()));
        out.push_back(std::move(s));
    }
    return out;
}

struct TestGrid {
    std::vector<double> theta;
    std::vector<double> phi;
    std::vector<double> angle;  // X = cos α e1 + sin α e2
};

inline TestGrid default_grid()
{
    TestGrid g;
    for (int i = 0; i < 9; ++i) g.theta.push_back(std::numbers::pi * (i + 0.5) / 9.0);
    for (int j = 0; j < 8; ++j) g.phi.push_back(2.0 * std::numbers::pi * j / 8.0);
    for (int k = 0; k < 3; ++k) g.angle.push_back(std::numbers::pi * k / 3.0 + 0.3);
    return g;
}

inline Eigen::Vector2cd project(const Eigen::Vector2cd& v, int comp)
{
    Eigen::Vector2cd p = Eigen::Vector2cd::Zero();
    p(comp) = v(comp);
    return p;
}

// Kählerian Killing equations with constant κ: ∇_Xφ₀ = κ X^-·φ₁, ∇_Xφ₁ = κ X^+·φ₀.
inline double killing_residual(const SphereSpinorBasis& basis, const SphereSpinor& psi, double kappa, const TestGrid& grid)
{
    const auto& f = fiber_data();
    const Complex i(0.0, 1.0);
    double worst = 0.0;
    for (double th : grid.theta)
        for (double ph : grid.phi) {
            const PointJet jet = evaluate(basis, psi, th, ph);
            const Eigen::Vector2cd n1 = jet.nabla1(), n2 = jet.nabla2(th);
            const Eigen::Vector2cd phi0 = project(jet.value, 0), phi1 = project(jet.value, 1);
            for (double al : grid.angle) {
                const double x1 = std::cos(al), x2 = std::sin(al);
                const Eigen::Vector2cd nab = x1 * n1 + x2 * n2;
                // X^± = (X ∓ iJX)/2 with JX = x1 e2 - x2 e1.
                const Complex p1 = 0.5 * (x1 + i * x2), p2 = 0.5 * (x2 - i * x1);
                const Complex m1 = 0.5 * (x1 - i * x2), m2 = 0.5 * (x2 + i * x1);
                const Eigen::Matrix2cd xplus = p1 * f.c1 + p2 * f.c2;
                const Eigen::Matrix2cd xminus = m1 * f.c1 + m2 * f.c2;
                const Eigen::Vector2cd r0 = project(nab, 0) - kappa * (xminus * phi1);
                const Eigen::Vector2cd r1 = project(nab, 1) - kappa * (xplus * phi0);
                worst = std::max({worst, r0.norm(), r1.norm()});
            }
        }
    return worst;
}

inline KillingReport killing_spinor_space(const SphereSpinorBasis& basis, const SphereSpectrum& sp, const TestGrid& grid = default_grid())
{
    KillingReport rep;
    const double lambda0 = std::sqrt(sp.min_square());
    rep.lambda = lambda0;
    const double kappa = -lambda0 / 2.0;
    rep.basis = eigenspace(basis, sp, lambda0);
    rep.dimension = static_cast<int>(rep.basis.size());
    for (const auto& b : rep.basis) rep.residual = std::max(rep.residual, killing_residual(basis, b, kappa, grid));
    for (const auto& b : eigenspace(basis, sp, -lambda0)) rep.opposite_residual = std::max(rep.opposite_residual, killing_residual(basis, b, kappa, grid));
    return rep;
}

inline SphereSpinor component(const SphereSpinorBasis& basis, const SphereSpinor& psi, int comp)
{
    SphereSpinor out = psi;
    for (std::size_t b = 0; b < basis.blocks().size(); ++b) {
        const int cnt = basis.blocks()[b].count;
        out.blocks[b].segment((1 - comp) * cnt, cnt).setZero();
    }
    return out;
}

// D²φ_r = (m+2)S/(4(m+1)) φ_r + (m-2r)/(2(m+1)) iρ·φ_r on each graded component, sup residual over the grid.
inline double eq44_residual(const SphereSpinorBasis& basis, const SphereSpectrum& sp, const SphereSpinor& psi, int r, const TestGrid& grid)
{
    const auto& f = fiber_data();
    const Complex i(0.0, 1.0);
    const SphereSpinor comp = component(basis, psi, r);
    const SphereSpinor d2 = sp.dirac.apply(sp.dirac.apply(comp));
    const double c0 = 3.0 * scalar_curvature / 8.0;
    const double c1 = (1.0 - 2.0 * r) / 4.0;
    double worst = 0.0;
    for (double th : grid.theta)
        for (double ph : grid.phi) {
            const auto v = evaluate(basis, comp, th, ph).value;
            const auto w = evaluate(basis, d2, th, ph).value;
            worst = std::max(worst, (w - c0 * v - c1 * i * (f.rho * v)).norm());
        }
    return worst;
}

// Anti-holomorphic identities with r = 0 on the Σ₀ part of each Killing spinor.
inline Prop43Residuals<Complex> prop43_sphere(const SphereSpinorBasis& basis, const SphereSpectrum& sp, const SphereSpinor& psi,
                                               const TestGrid& grid, double tol)
{
    const FiberContext<Complex> ctx(1);
    CurvatureData data{RicciModel::einstein(1, Rational(2)), Rational(2), {}, {}, {}};
    const SphereSpinor phi0 = component(basis, psi, 0);
    const SphereSpinor dphi = sp.dirac.apply(phi0);
    const SphereSpinor d2 = sp.dirac.apply(dphi);
    Prop43Residuals<Complex> res;
    auto to_spinor = [](const Eigen::Vector2cd& v) { return SpinorVector<Complex>(1, Vector<Complex>{v(0), v(1)}); };
    for (double th : grid.theta)
        for (double ph : grid.phi) {
            const PointJet j0 = evaluate(basis, phi0, th, ph);
            const PointJet jp = evaluate(basis, component(basis, dphi, 1), th, ph);
            Prop43Point<Complex> pt{to_spinor(j0.value), to_spinor(jp.value), ctx.zero_spinor(),
                                    to_spinor(evaluate(basis, component(basis, d2, 0), th, ph).value), {}};
            pt.grad_phi_plus = {to_spinor(jp.nabla1()), to_spinor(jp.nabla2(th))};
            prop43_accumulate(ctx, 0, data, pt, res, tol);
        }
    return res;
}

}  // namespace kspin::sphere
