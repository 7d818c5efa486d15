#include "mnls/op.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

namespace mnls {

namespace {

using Trip = Eigen::Triplet<cplx>;

// CG for Hermitian positive definite systems given as matvec closures
SolveStats conjugate_gradient(const std::function<void(const Field&, Field&)>& matvec,
                              const Field& b, Field& x, double tol, int max_iter) {
    Field r(b.size()), p(b.size()), ap(b.size());
    matvec(x, ap);
    r = b - ap;
    p = r;
    double bn = b.norm();
    if (bn == 0.0) {
        x.setZero();
        return {0, 0.0};
    }
    double rr = r.squaredNorm();
    int it = 0;
    for (; it < max_iter; ++it) {
        if (std::sqrt(rr) <= tol * bn) break;
        matvec(p, ap);
        double pap = std::real(p.dot(ap));
        double alpha = rr / pap;
        x += alpha * p;
        r -= alpha * ap;
        double rr_new = r.squaredNorm();
        p = r + (rr_new / rr) * p;
        rr = rr_new;
    }
    return {it, std::sqrt(rr) / bn};
}

}  // namespace

DiscreteOperator::DiscreteOperator(const Grid& g, const CoefficientSet& cs, int eig_threshold)
    : grid_(&g), cs_(&cs), eig_threshold_(eig_threshold) {
    if (g.dim() != cs.dim) throw std::invalid_argument("operator: grid/coefficients dim mismatch");
    assemble();
}

void DiscreteOperator::assemble() {
    const Grid& g = *grid_;
    const CoefficientSet& cs = *cs_;
    const int n = g.dim();
    const int N = g.interior_size();
    const double h = g.h();

    for (int k = 0; k < n; ++k) {
        aface_[k].resize(N);
        bface_[k].resize(N);
        bcen_[k].resize(N);
    }
    ccen_.resize(N);

    double amat[kMaxDim][kMaxDim], bvec[kMaxDim];
    for (int ord = 0; ord < N; ++ord) {
        Point x = g.coords(ord);
        cs.metric(x, amat);
        for (int j = 0; j < n && !has_cross_; ++j)
            for (int k = 0; k < n; ++k)
                if (j != k && amat[j][k] != 0.0) { has_cross_ = true; break; }
        cs.magnetic(x, bvec);
        for (int k = 0; k < n; ++k) bcen_[k][ord] = bvec[k];
        ccen_[ord] = cs.electric(x);
        for (int k = 0; k < n; ++k) {
            Point xf = x;
            xf[k] += h / 2.0;
            cs.metric(xf, amat);
            aface_[k][ord] = amat[k][k];
            cs.magnetic(xf, bvec);
            bface_[k][ord] = bvec[k];
        }
    }

    std::vector<Trip> trips;
    trips.reserve(static_cast<std::size_t>(N) * (2 * n + 1 + (has_cross_ ? 8 * n * n : 0)));

    for (int ord = 0; ord < N; ++ord) {
        cplx diag(ccen_[ord], 0.0);
        for (int k = 0; k < n; ++k) {
            // face on the + side of this cell
            double af = aface_[k][ord];
            double bf = bface_[k][ord];
            cplx alpha(1.0 / h, bf / 2.0);
            cplx beta(-1.0 / h, bf / 2.0);
            int nb = g.neighbor(ord, k, +1);
            diag += af * std::norm(beta);
            if (nb >= 0) {
                trips.emplace_back(ord, nb, af * std::conj(beta) * alpha);
                // and the neighbor's share of this face is added when we visit
                // it from the neighbor's - side below
            }
            // face on the - side: owned by the - neighbor if interior
            int nbm = g.neighbor(ord, k, -1);
            if (nbm >= 0) {
                double afm = aface_[k][nbm];
                double bfm = bface_[k][nbm];
                cplx alpham(1.0 / h, bfm / 2.0);
                cplx betam(-1.0 / h, bfm / 2.0);
                diag += afm * std::norm(alpham);
                trips.emplace_back(ord, nbm, afm * std::conj(alpham) * betam);
            } else {
                // ghost on the - side: face value alpha * u
                Point x = g.coords(ord);
                Point xf = x;
                xf[k] -= h / 2.0;
                double am[kMaxDim][kMaxDim], bv[kMaxDim];
                cs.metric(xf, am);
                cs.magnetic(xf, bv);
                cplx alpham(1.0 / h, bv[k] / 2.0);
                diag += am[k][k] * std::norm(alpham);
            }
        }
        trips.emplace_back(ord, ord, diag);

        if (has_cross_) {
            // -Gc_j(a_jk Gc_k u): programmatic stencil composition
            Point x = g.coords(ord);
            double amat2[kMaxDim][kMaxDim];
            for (int j = 0; j < n; ++j) {
                // outer factors: shift +e_j (1/2h), shift -e_j (-1/2h), center (i b_j(x))
                struct Piece { int dir; cplx coef; };
                Piece outer[3] = {{+1, cplx(1.0 / (2 * h), 0)},
                                  {-1, cplx(-1.0 / (2 * h), 0)},
                                  {0, cplx(0, bcen_[j][ord])}};
                for (const Piece& po : outer) {
                    int mid = ord;
                    if (po.dir != 0) {
                        mid = g.neighbor(ord, j, po.dir);
                        if (mid < 0) continue;  // ghost: w = 0 there
                    }
                    Point xm = g.coords(mid);
                    cs.metric(xm, amat2);
                    for (int k = 0; k < n; ++k) {
                        if (k == j) continue;
                        double m = amat2[j][k];
                        if (m == 0.0) continue;
                        Piece inner[3] = {{+1, cplx(1.0 / (2 * h), 0)},
                                          {-1, cplx(-1.0 / (2 * h), 0)},
                                          {0, cplx(0, bcen_[k][mid])}};
                        for (const Piece& pi : inner) {
                            int dst = mid;
                            if (pi.dir != 0) {
                                dst = g.neighbor(mid, k, pi.dir);
                                if (dst < 0) continue;
                            }
                            trips.emplace_back(ord, dst, -po.coef * m * pi.coef);
                        }
                    }
                }
            }
        }
    }

    P_.resize(N, N);
    P_.setFromTriplets(trips.begin(), trips.end());
    P_.makeCompressed();
}

void DiscreteOperator::apply_P(const Field& u, Field& out) const { out.noalias() = P_ * u; }

Field DiscreteOperator::apply_L(const Field& u) const {
    if (u.size() != grid_->interior_size()) throw std::invalid_argument("apply_L: grid mismatch");
    return -(P_ * u);
}

void DiscreteOperator::magnetic_gradient(const Field& u, std::array<Field, kMaxDim>& grad) const {
    const Grid& g = *grid_;
    if (u.size() != g.interior_size()) throw std::invalid_argument("magnetic_gradient: grid mismatch");
    const int n = g.dim();
    const double inv2h = 1.0 / (2.0 * g.h());
    for (int k = 0; k < n; ++k) {
        grad[k].resize(u.size());
        for (int ord = 0; ord < g.interior_size(); ++ord) {
            int np = g.neighbor(ord, k, +1), nm = g.neighbor(ord, k, -1);
            cplx d = ((np >= 0 ? u[np] : cplx(0)) - (nm >= 0 ? u[nm] : cplx(0))) * inv2h;
            grad[k][ord] = d + cplx(0, bcen_[k][ord]) * u[ord];
        }
    }
}

double DiscreteOperator::quadratic_form(const Field& u) const {
    const Grid& g = *grid_;
    if (u.size() != g.interior_size()) throw std::invalid_argument("quadratic_form: grid mismatch");
    const int n = g.dim();
    const int N = g.interior_size();
    const double h = g.h();
    double acc = 0;
    for (int ord = 0; ord < N; ++ord) {
        for (int k = 0; k < n; ++k) {
            int nb = g.neighbor(ord, k, +1);
            cplx up = nb >= 0 ? u[nb] : cplx(0);
            cplx gv = (up - u[ord]) / h + cplx(0, bface_[k][ord] / 2.0) * (up + u[ord]);
            acc += aface_[k][ord] * std::norm(gv);
            if (g.neighbor(ord, k, -1) < 0) {
                // unowned ghost face on the - side
                Point x = g.coords(ord);
                Point xf = x;
                xf[k] -= h / 2.0;
                double am[kMaxDim][kMaxDim], bv[kMaxDim];
                cs_->metric(xf, am);
                cs_->magnetic(xf, bv);
                cplx gm = u[ord] / h + cplx(0, bv[k] / 2.0) * u[ord];
                acc += am[k][k] * std::norm(gm);
            }
        }
        acc += ccen_[ord] * std::norm(u[ord]);
    }
    if (has_cross_) {
        std::array<Field, kMaxDim> gr;
        magnetic_gradient(u, gr);
        double amat[kMaxDim][kMaxDim];
        for (int ord = 0; ord < N; ++ord) {
            Point x = g.coords(ord);
            cs_->metric(x, amat);
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    if (j != k) acc += amat[j][k] * std::real(gr[k][ord] * std::conj(gr[j][ord]));
        }
    }
    return acc * g.cell_volume();
}

double DiscreteOperator::flux_gradient_norm2(const Field& u) const {
    const Grid& g = *grid_;
    const int n = g.dim();
    const double h = g.h();
    double acc = 0;
    for (int ord = 0; ord < g.interior_size(); ++ord)
        for (int k = 0; k < n; ++k) {
            int nb = g.neighbor(ord, k, +1);
            cplx up = nb >= 0 ? u[nb] : cplx(0);
            acc += std::norm((up - u[ord]) / h);
            if (g.neighbor(ord, k, -1) < 0) acc += std::norm(u[ord] / h);
        }
    return acc * g.cell_volume();
}

double DiscreteOperator::magnetic_gradient_norm2(const Field& u) const {
    std::array<Field, kMaxDim> gr;
    magnetic_gradient(u, gr);
    double acc = 0;
    for (int k = 0; k < grid_->dim(); ++k) acc += gr[k].squaredNorm();
    return acc * grid_->cell_volume();
}

double DiscreteOperator::hermiticity_defect() const {
    Eigen::SparseMatrix<cplx, Eigen::RowMajor> D = P_;
    Eigen::SparseMatrix<cplx, Eigen::RowMajor> At = P_.adjoint();
    D -= At;
    double mx = 0, scale = 0;
    for (int r = 0; r < D.outerSize(); ++r)
        for (Eigen::SparseMatrix<cplx, Eigen::RowMajor>::InnerIterator it(D, r); it; ++it)
            mx = std::max(mx, std::abs(it.value()));
    for (int r = 0; r < P_.outerSize(); ++r)
        for (Eigen::SparseMatrix<cplx, Eigen::RowMajor>::InnerIterator it(P_, r); it; ++it)
            scale = std::max(scale, std::abs(it.value()));
    return scale > 0 ? mx / scale : 0.0;
}

double DiscreteOperator::operator_norm_estimate() const {
    // power iteration (deterministic start)
    Field v = Field::Ones(grid_->interior_size());
    v /= v.norm();
    Field w(v.size());
    double lam = 0;
    for (int i = 0; i < 60; ++i) {
        apply_P(v, w);
        lam = w.norm();
        if (lam == 0) return 0;
        v = w / lam;
    }
    return lam;
}

bool DiscreteOperator::eig_available() const {
    return grid_->interior_size() <= eig_threshold_;
}

void DiscreteOperator::ensure_eig() const {
    if (eig_) return;
    if (!eig_available())
        throw std::runtime_error("operator: grid too large for the dense spectral route");
    Eigen::MatrixXcd dense = Eigen::MatrixXcd(P_);
    eig_.emplace(dense);
    if (eig_->info() != Eigen::Success) throw std::runtime_error("operator: eigensolver failed");
}

const Eigen::VectorXd& DiscreteOperator::eigenvalues() const {
    ensure_eig();
    return eig_->eigenvalues();
}

const Eigen::MatrixXcd& DiscreteOperator::eigenvectors() const {
    ensure_eig();
    return eig_->eigenvectors();
}

Field DiscreteOperator::fractional_apply(const Field& u, double sigma) const {
    if (sigma < 0 || sigma > 1) throw std::invalid_argument("fractional power needs sigma in [0,1]");
    if (sigma == 0.0) return u;
    if (sigma == 1.0) return P_ * u;
    if (eig_available()) {
        ensure_eig();
        double lmin = eig_->eigenvalues().minCoeff();
        double lmax = eig_->eigenvalues().maxCoeff();
        if (lmin < -1e-8 * std::max(1.0, lmax))
            throw std::runtime_error(
                "operator is indefinite (negative-part bound C- exceeds 2 sqrt(nu)/(n-2)); "
                "fractional powers need a nonnegative operator");
        Eigen::VectorXd lam = eig_->eigenvalues().cwiseMax(0.0);
        Eigen::VectorXcd coeff = eig_->eigenvectors().adjoint() * u;
        for (int i = 0; i < lam.size(); ++i) coeff[i] *= std::pow(lam[i], sigma);
        return eig_->eigenvectors() * coeff;
    }
    if (std::abs(sigma - 0.5) > 1e-12)
        throw std::runtime_error(
            "fractional powers on large grids are limited to sigma in {0, 1/2, 1}");
    return lanczos_matrix_function(*this, u, [](double s) { return std::sqrt(std::max(s, 0.0)); });
}

Field DiscreteOperator::heat_apply(const Field& u, double t) const {
    if (t <= 0) throw std::invalid_argument("heat_apply: t must be positive");
    if (eig_available()) {
        ensure_eig();
        Eigen::VectorXcd coeff = eig_->eigenvectors().adjoint() * u;
        for (int i = 0; i < coeff.size(); ++i) coeff[i] *= std::exp(-t * eig_->eigenvalues()[i]);
        return eig_->eigenvectors() * coeff;
    }
    // unconditionally stable midpoint substeps
    int m = 200;
    double tau = t / m;
    Field x = u, rhs(u.size()), tmp(u.size());
    auto mv = [&](const Field& v, Field& out) { out = v + (tau / 2.0) * (P_ * v); };
    for (int s = 0; s < m; ++s) {
        rhs = x - (tau / 2.0) * (P_ * x);
        conjugate_gradient(mv, rhs, x, 1e-12, 500);
    }
    return x;
}

Field DiscreteOperator::resolvent_apply(const Field& u, double eps, SolveStats* stats) const {
    if (eps <= 0) throw std::invalid_argument("resolvent_apply: eps must be positive");
    auto mv = [&](const Field& v, Field& out) { out = v + eps * (P_ * v); };
    Field x = Field::Zero(u.size());
    SolveStats st = conjugate_gradient(mv, u, x, 1e-10, 5000);
    if (st.residual > 1e-8)
        throw std::runtime_error("resolvent iteration did not converge (operator indefinite?)");
    double contraction = x.norm() / std::max(u.norm(), 1e-300);
    if (contraction > 1.0 + 1e-8)
        throw std::runtime_error("resolvent contraction violated: operator has negative modes");
    if (stats) *stats = st;
    return x;
}

Field DiscreteOperator::propagate(const Field& u, double t, double dt_hint) const {
    if (t == 0.0) return u;
    if (eig_available()) {
        ensure_eig();
        Eigen::VectorXcd coeff = eig_->eigenvectors().adjoint() * u;
        // e^{itL} = e^{-itP}
        for (int i = 0; i < coeff.size(); ++i)
            coeff[i] *= std::exp(cplx(0.0, -t * eig_->eigenvalues()[i]));
        return eig_->eigenvectors() * coeff;
    }
    double dt = dt_hint > 0 ? dt_hint : 1e-2;
    int steps = std::max(1, static_cast<int>(std::llround(std::abs(t) / dt)));
    double theta = -t / (2.0 * steps);  // e^{-i t P}: Cayley factor per step
    Field x = u;
    Field rhs(u.size());
    for (int s = 0; s < steps; ++s) {
        rhs = x + cplx(0, theta) * (P_ * x);
        solve_cayley(rhs, theta, x);
    }
    return x;
}

SolveStats DiscreteOperator::solve_cayley(const Field& rhs, double theta, Field& x,
                                          double tol) const {
    // (I - i theta P) x = rhs solved through the normal equations
    // (I + theta^2 P^2) x = (I + i theta P) rhs
    Field b = rhs + cplx(0, theta) * (P_ * rhs);
    auto mv = [&](const Field& v, Field& out) {
        Field pv = P_ * v;
        out = v + (theta * theta) * (P_ * pv);
    };
    if (x.size() != rhs.size()) x = Field::Zero(rhs.size());
    return conjugate_gradient(mv, b, x, tol, 2000);
}

DominationReport DiscreteOperator::diamagnetic_domination_check(const Field& phi, double t,
                                                                double tol) const {
    // magnetic operator without potential vs plain operator without b and c
    CoefficientSet nb = *cs_;
    nb.electric = [](const Point&) { return 0.0; };
    nb.electric_grad = [n = cs_->dim](const Point&, double(&g)[kMaxDim]) {
        for (int k = 0; k < n; ++k) g[k] = 0.0;
    };
    CoefficientSet plain = nb;
    plain.magnetic = [n = cs_->dim](const Point&, double(&b)[kMaxDim]) {
        for (int k = 0; k < n; ++k) b[k] = 0.0;
    };
    plain.magnetic_d1 = [n = cs_->dim](const Point&, double(&b1)[kMaxDim][kMaxDim]) {
        for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l) b1[j][l] = 0.0;
    };
    DiscreteOperator opb(*grid_, nb, eig_threshold_);
    DiscreteOperator op0(*grid_, plain, eig_threshold_);
    Field mag = opb.heat_apply(phi, t);
    Field absphi(phi.size());
    for (int i = 0; i < phi.size(); ++i) absphi[i] = std::abs(phi[i]);
    Field dom = op0.heat_apply(absphi, t);
    DominationReport rep;
    rep.tolerance = tol;
    for (int i = 0; i < phi.size(); ++i)
        rep.max_violation = std::max(rep.max_violation, std::abs(mag[i]) - std::real(dom[i]));
    rep.holds = rep.max_violation <= tol;
    return rep;
}

void DiscreteOperator::corrupt_for_testing() {
    for (int r = 0; r < P_.outerSize(); ++r)
        for (Eigen::SparseMatrix<cplx, Eigen::RowMajor>::InnerIterator it(P_, r); it; ++it)
            if (it.col() > r) {
                it.valueRef() += cplx(0, 1e-3);
                eig_.reset();
                return;
            }
}

Field lanczos_matrix_function(const DiscreteOperator& op, const Field& v,
                              const std::function<double(double)>& f, int max_krylov,
                              double tol) {
    double vn = v.norm();
    if (vn == 0.0) return v;
    const int N = static_cast<int>(v.size());
    std::vector<Field> V;
    V.push_back(v / vn);
    std::vector<double> alpha, beta;
    Field w(N);
    Field prev_result;
    for (int j = 0; j < max_krylov; ++j) {
        op.apply_P(V[j], w);
        double a = std::real(V[j].dot(w));
        alpha.push_back(a);
        w -= a * V[j];
        if (j > 0) w -= beta[j - 1] * V[j - 1];
        for (const auto& q : V) w -= q.dot(w) * q;  // full reorthogonalization
        double b = w.norm();
        int m = j + 1;
        bool check = (m % 10 == 0) || b <= 1e-14 || m == max_krylov;
        if (check) {
            Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
            for (int i = 0; i < m; ++i) {
                T(i, i) = alpha[i];
                if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
            Eigen::VectorXd fe = es.eigenvalues();
            for (int i = 0; i < m; ++i) fe[i] = f(es.eigenvalues()[i]);
            Eigen::VectorXd y = es.eigenvectors() * fe.cwiseProduct(
                                    es.eigenvectors().row(0).transpose().eval());
            Field result = Field::Zero(N);
            for (int i = 0; i < m; ++i) result += vn * y[i] * V[i];
            if (prev_result.size() && (result - prev_result).norm() <=
                                          tol * std::max(result.norm(), 1e-300))
                return result;
            prev_result = result;
            if (b <= 1e-14 || m == max_krylov) return result;
        }
        beta.push_back(b);
        V.push_back(w / b);
    }
    return prev_result;
}

double gauge_covariance_error(const Grid& g, const CoefficientSet& cs,
                              const std::function<double(const Point&)>& phi,
                              const std::function<void(const Point&, double(&)[kMaxDim])>& grad_phi,
                              const Field& u) {
    CoefficientSet shifted = cs;
    auto base_b = cs.magnetic;
    shifted.magnetic = [base_b, grad_phi, n = cs.dim](const Point& x, double(&b)[kMaxDim]) {
        base_b(x, b);
        double gp[kMaxDim];
        grad_phi(x, gp);
        for (int k = 0; k < n; ++k) b[k] += gp[k];
    };
    DiscreteOperator op(g, cs, 1);
    DiscreteOperator ops(g, shifted, 1);
    // continuum covariance: (grad + i(b + grad phi))(e^{-i phi} u) = e^{-i phi} (grad + ib) u
    Field pha(u.size()), ref(u.size());
    for (int ord = 0; ord < g.interior_size(); ++ord) {
        double p = phi(g.coords(ord));
        pha[ord] = u[ord] * cplx(std::cos(p), -std::sin(p));
    }
    Field lhs = ops.matrix() * pha;
    Field pu = op.matrix() * u;
    for (int ord = 0; ord < g.interior_size(); ++ord) {
        double p = phi(g.coords(ord));
        ref[ord] = pu[ord] * cplx(std::cos(p), -std::sin(p));
    }
    return (lhs - ref).norm() / std::max(pu.norm(), 1e-300);
}

}  // namespace mnls
