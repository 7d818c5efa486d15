#include "mnls/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace mnls {

double mass(const Field& u, double cell_vol) { return u.squaredNorm() * cell_vol; }

double energy(const DiscreteOperator& op, const Nonlinearity& nl, const Field& u) {
    double e = 0.5 * op.quadratic_form(u);
    double fint = 0;
    for (int i = 0; i < u.size(); ++i) fint += nl.F(std::abs(u[i]));
    return e + fint * op.grid().cell_volume();
}

double lp_norm(const Field& u, double p, double cell_vol) {
    double acc = 0;
    for (int i = 0; i < u.size(); ++i) acc += std::pow(std::abs(u[i]), p);
    return std::pow(acc * cell_vol, 1.0 / p);
}

McResult mc_norm(const ShellPartition& sh, const RealField& density_sq, McKind kind) {
    std::vector<double> sums;
    McResult res;
    const auto& radii = sh.radii();
    if (kind == McKind::Xdot || kind == McKind::X) {
        sh.surface_sums(density_sq, sums);
        for (std::size_t k = 0; k < radii.size(); ++k) {
            double denom = (kind == McKind::Xdot) ? sq(radii[k]) : 1.0 + sq(radii[k]);
            double v = sums[k] / denom;
            if (v > res.value) {
                res.value = v;
                res.argmax_R = radii[k];
            }
        }
    } else {
        sh.ball_sums(density_sq, sums);
        for (std::size_t k = 0; k < radii.size(); ++k) {
            double denom = (kind == McKind::Ydot) ? radii[k] : std::sqrt(1.0 + sq(radii[k]));
            double v = sums[k] / denom;
            if (v > res.value) {
                res.value = v;
                res.argmax_R = radii[k];
            }
        }
    }
    res.value = std::sqrt(res.value);
    return res;
}

McResult mc_norm_field(const ShellPartition& sh, const Field& v, McKind kind) {
    RealField d(v.size());
    for (int i = 0; i < v.size(); ++i) d[i] = std::norm(v[i]);
    return mc_norm(sh, d, kind);
}

// ---- accumulator -----------------------------------------------------------

SpaceTimeAccumulator::SpaceTimeAccumulator(const DiscreteOperator& op, const ShellPartition& sh,
                                           const Nonlinearity& nl, double eps_exp,
                                           bool with_kernel, int kernel_stride)
    : op_(&op), sh_(&sh), nl_(&nl), eps_(eps_exp), with_kernel_(with_kernel),
      kernel_stride_(kernel_stride) {
    const Grid& g = op.grid();
    if (with_kernel_) {
        if (g.dim() == 3)
            throw std::invalid_argument(
                "the |x-y|^{-3} interaction kernel diverges in dimension 3; use the L4 variant");
        kernel_ = std::make_unique<InteractionKernel>(g, 3.0);
    }
    int N = g.interior_size();
    inv_absx_.resize(N);
    inv_brax_.resize(N);
    w32w_.resize(N);
    w12w_.resize(N);
    w1w_.resize(N);
    for (int i = 0; i < N; ++i) {
        double r = g.radius(i);
        double br2 = 1.0 + r * r;
        inv_absx_[i] = 1.0 / std::max(r, 1e-12);
        inv_brax_[i] = 1.0 / std::sqrt(br2);
        w32w_[i] = std::pow(br2, -(1.5 + eps_));      // <x>^{-3-2eps}
        w12w_[i] = std::pow(br2, -(0.5 + eps_));      // <x>^{-1-2eps}
        w1w_[i] = std::pow(br2, -(1.0 + eps_));       // <x>^{-2-2eps}
    }
    shell_u2_.assign(sh.count(), 0.0);
    ball_grad2_.assign(sh.count(), 0.0);
}

void SpaceTimeAccumulator::add_step(double t, const Field& u) {
    const Grid& g = op_->grid();
    const double vol = g.cell_volume();
    int N = g.interior_size();

    RealField u2(N);
    for (int i = 0; i < N; ++i) u2[i] = std::norm(u[i]);

    std::array<Field, kMaxDim> gr;
    op_->magnetic_gradient(u, gr);
    RealField g2(N);
    g2.setZero();
    for (int k = 0; k < g.dim(); ++k)
        for (int i = 0; i < N; ++i) g2[i] += std::norm(gr[k][i]);

    std::vector<double> ssum, bsum;
    sh_->surface_sums(u2, ssum);
    sh_->ball_sums(g2, bsum);

    double br_absx = 0, br_brax = 0, w32 = 0, w12 = 0, w1 = 0, l4 = 0;
    for (int i = 0; i < N; ++i) {
        double br = nl_->bracket(u[i]);
        br_absx += br * inv_absx_[i];
        br_brax += br * inv_brax_[i];
        w32 += w32w_[i] * u2[i];
        w12 += w12w_[i] * g2[i];
        w1 += w1w_[i] * u2[i];
        l4 += u2[i] * u2[i];
    }
    br_absx *= vol;
    br_brax *= vol;
    w32 *= vol;
    w12 *= vol;
    w1 *= vol;
    l4 *= vol;

    if (first_) {
        hhalf0_ = sobolev_norm(g, u, 0.5);
        mass0_ = mass(u, vol);
        first_ = false;
    } else {
        double w = 0.5 * (t - prev_t_);
        for (int k = 0; k < sh_->count(); ++k) {
            shell_u2_[k] += w * (prev_shell_u2_[k] + ssum[k]);
            ball_grad2_[k] += w * (prev_ball_grad2_[k] + bsum[k]);
        }
        bracket_absx_ += w * (prev_bracket_absx_ + br_absx);
        bracket_brax_ += w * (prev_bracket_brax_ + br_brax);
        w32_ += w * (prev_w32_ + w32);
        w12_ += w * (prev_w12_ + w12);
        w1_ += w * (prev_w1_ + w1);
        l4_ += w * (prev_l4_ + l4);
    }
    prev_shell_u2_ = ssum;
    prev_ball_grad2_ = bsum;
    prev_bracket_absx_ = br_absx;
    prev_bracket_brax_ = br_brax;
    prev_w32_ = w32;
    prev_w12_ = w12;
    prev_w1_ = w1;
    prev_l4_ = l4;
    prev_t_ = t;

    if (with_kernel_ && (step_count_ % kernel_stride_ == 0)) {
        double kv = kernel_->evaluate(u2);
        if (!kernel_first_) kernel_int_ += 0.5 * (t - prev_kernel_t_) * (prev_kernel_v_ + kv);
        prev_kernel_t_ = t;
        prev_kernel_v_ = kv;
        kernel_first_ = false;
    }
    ++step_count_;
}

void SpaceTimeAccumulator::mark_horizon(double T, const Field& u_at_T) {
    Horizon h;
    h.T = T;
    h.shell_u2 = shell_u2_;
    h.ball_grad2 = ball_grad2_;
    h.bracket_absx = bracket_absx_;
    h.bracket_brax = bracket_brax_;
    h.w32_u2 = w32_;
    h.w12_grad2 = w12_;
    h.w1_u2 = w1_;
    h.l4_int = l4_;
    h.kernel_int = kernel_int_;
    h.hhalf_end = sobolev_norm(op_->grid(), u_at_T, 0.5);
    h.mass_end = mass(u_at_T, op_->grid().cell_volume());
    h.boundary_frac = op_->grid().boundary_band_fraction(u_at_T);
    horizons_.push_back(std::move(h));
}

namespace {

// sup over the radius list of integrated shell quantities
double sup_over_radii(const std::vector<double>& vals, const std::vector<double>& radii,
                      bool surface, bool homogeneous, double* argmax = nullptr) {
    double best = 0, bestR = 0;
    for (std::size_t k = 0; k < radii.size(); ++k) {
        double R = radii[k];
        double denom = surface ? (homogeneous ? R * R : 1.0 + R * R)
                               : (homogeneous ? R : std::sqrt(1.0 + R * R));
        double v = vals[k] / denom;
        if (v > best) {
            best = v;
            bestR = R;
        }
    }
    if (argmax) *argmax = bestR;
    return best;
}

}  // namespace

EstimateReport smoothing_report(const SpaceTimeAccumulator& acc, std::size_t hi,
                                SmoothingVariant variant) {
    const auto& h = acc.horizons().at(hi);
    const auto& radii = acc.shells().radii();
    EstimateReport rep;
    rep.T = h.T;
    rep.caveats.push_back("discrete sup over shell radii >= 2h (lower bound of the true sup)");
    {
        char buf[96];
        std::snprintf(buf, sizeof buf, "boundary_mass_fraction=%.3e", h.boundary_frac);
        rep.caveats.emplace_back(buf);
    }
    rep.constants.emplace_back("eps_exp", acc.eps_exp());

    double argR = 0;
    switch (variant) {
        case SmoothingVariant::thm_n_ge_4: {
            rep.estimate = "smoothing_n_ge_4";
            double xdot2 = sup_over_radii(h.shell_u2, radii, true, true, &argR);
            double ydot2 = sup_over_radii(h.ball_grad2, radii, false, true);
            rep.components.emplace_back("xdot2_u", xdot2);
            rep.components.emplace_back("ydot2_gradb", ydot2);
            rep.components.emplace_back("bracket_absx", h.bracket_absx);
            rep.constants.emplace_back("argmax_R", argR);
            rep.lhs = xdot2 + ydot2 + h.bracket_absx;
            rep.rhs = sq(acc.hhalf_initial()) + sq(h.hhalf_end);
            break;
        }
        case SmoothingVariant::thm_n_eq_3: {
            rep.estimate = "smoothing_n_eq_3";
            double x2 = sup_over_radii(h.shell_u2, radii, true, false, &argR);
            double y2 = sup_over_radii(h.ball_grad2, radii, false, false);
            rep.components.emplace_back("x2_u", x2);
            rep.components.emplace_back("y2_gradb", y2);
            rep.components.emplace_back("bracket_brax", h.bracket_brax);
            rep.constants.emplace_back("argmax_R", argR);
            rep.lhs = x2 + y2 + h.bracket_brax;
            rep.rhs = sq(acc.hhalf_initial()) + sq(h.hhalf_end);
            break;
        }
        case SmoothingVariant::weighted: {
            rep.estimate = "smoothing_weighted";
            rep.components.emplace_back("w32_u2", h.w32_u2);
            rep.components.emplace_back("w12_grad2", h.w12_grad2);
            rep.components.emplace_back("bracket_absx", h.bracket_absx);
            rep.lhs = h.w32_u2 + h.w12_grad2 + h.bracket_absx;
            rep.rhs = sq(acc.hhalf_initial()) + sq(h.hhalf_end);
            rep.caveats.push_back("measured constant only; no pass/fail bound stated");
            break;
        }
        case SmoothingVariant::linear_flow: {
            rep.estimate = "smoothing_linear_flow";
            rep.components.emplace_back("w1_u2", h.w1_u2);
            rep.lhs = h.w1_u2;
            rep.rhs = acc.mass_initial();
            break;
        }
    }
    rep.finalize_ratio();
    return rep;
}

EstimateReport interaction_report(const SpaceTimeAccumulator& acc, std::size_t hi,
                                  InteractionVariant variant) {
    const auto& h = acc.horizons().at(hi);
    EstimateReport rep;
    rep.T = h.T;
    rep.rhs = acc.mass_initial() * sq(acc.hhalf_initial() + h.hhalf_end);
    if (variant == InteractionVariant::kernel_n_ge_4) {
        rep.estimate = "interaction_kernel";
        rep.lhs = h.kernel_int;
        rep.components.emplace_back("kernel_int", h.kernel_int);
    } else {
        rep.estimate = "interaction_l4";
        rep.lhs = h.l4_int;
        rep.components.emplace_back("l4_int", h.l4_int);
    }
    rep.components.emplace_back("mass0", acc.mass_initial());
    rep.components.emplace_back("hhalf0", acc.hhalf_initial());
    rep.components.emplace_back("hhalfT", h.hhalf_end);
    {
        char buf[96];
        std::snprintf(buf, sizeof buf, "boundary_mass_fraction=%.3e", h.boundary_frac);
        rep.caveats.emplace_back(buf);
    }
    rep.finalize_ratio();
    return rep;
}

// ---- lemma suite ------------------------------------------------------------

std::vector<Field> lemma_test_family(const Grid& g, int count, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<Field> fam;
    const int n = g.dim();
    for (int f = 0; f < count; ++f) {
        Point c{};
        double cr = 0.25 * g.box();
        for (int k = 0; k < n; ++k) c[k] = cr * uni(rng);
        double w = 0.6 + 0.5 * (uni(rng) + 1.0);
        double lin[kMaxDim], quad[kMaxDim], p[kMaxDim];
        for (int k = 0; k < n; ++k) {
            lin[k] = 0.4 * uni(rng);
            quad[k] = 0.15 * uni(rng);
            p[k] = 1.5 * uni(rng);
        }
        Field u = g.zeros();
        for (int ord = 0; ord < g.interior_size(); ++ord) {
            Point x = g.coords(ord);
            double r2 = 0, poly = 1.0, phase = 0;
            for (int k = 0; k < n; ++k) {
                double y = x[k] - c[k];
                r2 += y * y;
                poly += lin[k] * y + quad[k] * y * y;
                phase += p[k] * x[k];
            }
            u[ord] = poly * std::exp(-r2 / (2.0 * w * w)) * cplx(std::cos(phase), std::sin(phase));
        }
        fam.push_back(std::move(u));
    }
    return fam;
}

namespace {

struct LemmaAcc {
    double worst_lhs = 0, worst_rhs = 0, worst_ratio = -1;
    int worst_field = -1;
    void update(double lhs, double rhs, int idx) {
        if (lhs == 0) return;
        double ratio = lhs / std::max(rhs, 1e-300);
        if (ratio > worst_ratio) {
            worst_ratio = ratio;
            worst_lhs = lhs;
            worst_rhs = rhs;
            worst_field = idx;
        }
    }
};

}  // namespace

std::vector<LemmaResult> lemma_suite(const DiscreteOperator& op, const ShellPartition& sh,
                                     const std::vector<Field>& family, double delta,
                                     double eps_h) {
    const Grid& g = op.grid();
    const int n = g.dim();
    const int N = g.interior_size();
    const double vol = g.cell_volume();
    if (n < 3) throw std::invalid_argument("lemma_suite: requires dimension >= 3");

    std::map<std::string, LemmaAcc> acc;
    std::map<std::string, double> constant = {
        {"weighted_xdot_to_ydot", 1.0},
        {"weighted_x_to_y", 1.0},
        {"tail_xdot", 1.0 / (n - 1.0)},
        {"tail_x", 2.0 / (n - 1.0)},
        {"singular_weight_xdot", 2.0 / delta},
        {"tail_weight_x", 2.0 / delta},
        {"bracket_weight_y", 8.0 / delta},
        {"y_le_ydot", 1.0},
        {"pair_xdot_ydot", 9.0 / delta},
        {"hardy_magnetic", 2.0 / (n - 2.0)},
        {"inv_weight_y", 1.0},     // combination lemma: 6,3 coefficients inside
        {"grad_pair_xy", 9.0 / delta},
        {"x_from_tail_and_grad", 1.0},  // 4,13 coefficients inside
        {"equivmag_forward", 1.0},
        {"equivmag_backward", 1.0},
        {"equivmagw_forward", 1.0},  // (1 + S_b) inside
    };

    // measured S_b = sup |b| <x>
    double Sb = 0;
    {
        double bvec[kMaxDim];
        for (int ord = 0; ord < N; ++ord) {
            Point x = g.coords(ord);
            op.coeffs().magnetic(x, bvec);
            double bn = 0;
            for (int k = 0; k < n; ++k) bn += bvec[k] * bvec[k];
            Sb = std::max(Sb, std::sqrt(bn * (1.0 + sq(g.radius(ord)))));
        }
    }

    const auto& radii = sh.radii();

    for (std::size_t fi = 0; fi < family.size(); ++fi) {
        const Field& v = family[fi];
        RealField v2(N), gb2(N), gb_abs(N);
        std::array<Field, kMaxDim> gr;
        op.magnetic_gradient(v, gr);
        for (int i = 0; i < N; ++i) {
            v2[i] = std::norm(v[i]);
            double s = 0;
            for (int k = 0; k < n; ++k) s += std::norm(gr[k][i]);
            gb2[i] = s;
            gb_abs[i] = std::sqrt(s);
        }

        double xdot2 = sq(mc_norm(sh, v2, McKind::Xdot).value);
        double x2 = sq(mc_norm(sh, v2, McKind::X).value);
        double ydot2_v = sq(mc_norm(sh, v2, McKind::Ydot).value);
        double y2_v = sq(mc_norm(sh, v2, McKind::Y).value);
        double ydot2_g = sq(mc_norm(sh, gb2, McKind::Ydot).value);
        double y2_g = sq(mc_norm(sh, gb2, McKind::Y).value);

        // weighted fields
        RealField v2_invx2(N), v2_invbr2(N);
        for (int i = 0; i < N; ++i) {
            double r = std::max<double>(g.radius(i), 1e-12);
            v2_invx2[i] = v2[i] / (r * r);
            v2_invbr2[i] = v2[i] / (1.0 + sq(g.radius(i)));
        }
        acc["weighted_xdot_to_ydot"].update(sq(mc_norm(sh, v2_invx2, McKind::Ydot).value), xdot2,
                                            fi);
        acc["weighted_x_to_y"].update(sq(mc_norm(sh, v2_invbr2, McKind::Y).value), x2, fi);

        // tail sups: sup_R R^{n-1} int_{>=R} |x|^{-n-2} |v|^2
        {
            std::vector<double> ball;
            RealField wv(N);
            for (int i = 0; i < N; ++i)
                wv[i] = v2[i] * std::pow(std::max<double>(g.radius(i), 1e-12), -(n + 2.0));
            sh.ball_sums(wv, ball);
            double total = ball.back();
            double sup_all = 0, sup_gt1 = 0;
            for (std::size_t k = 0; k < radii.size(); ++k) {
                double tail = total - ball[k];
                double val = std::pow(radii[k], n - 1.0) * tail;
                sup_all = std::max(sup_all, val);
                if (radii[k] > 1.0) sup_gt1 = std::max(sup_gt1, val);
            }
            acc["tail_xdot"].update(sup_all, xdot2 / (n - 1.0), fi);
            acc["tail_x"].update(sup_gt1, 2.0 / (n - 1.0) * x2, fi);
        }

        double int_sing = 0, int_tail = 0, int_brk = 0;
        for (int i = 0; i < N; ++i) {
            double r = std::max<double>(g.radius(i), 1e-12);
            double br = std::sqrt(1.0 + r * r);
            int_sing += v2[i] / (r * r * std::pow(br, 1.0 + delta));
            if (r >= 1.0) int_tail += v2[i] / std::pow(r, 3.0 + delta);
            int_brk += v2[i] / std::pow(br, 1.0 + delta);
        }
        acc["singular_weight_xdot"].update(int_sing * vol, 2.0 / delta * xdot2, fi);
        acc["tail_weight_x"].update(int_tail * vol, 2.0 / delta * x2, fi);
        acc["bracket_weight_y"].update(int_brk * vol, 8.0 / delta * y2_v, fi);
        acc["y_le_ydot"].update(y2_v, ydot2_v, fi);

        // pair inequality with the next field
        {
            const Field& w = family[(fi + 1) % family.size()];
            RealField w2(N);
            for (int i = 0; i < N; ++i) w2[i] = std::norm(w[i]);
            double lhs = 0;
            for (int i = 0; i < N; ++i) {
                double r = std::max<double>(g.radius(i), 1e-12);
                double vw = std::abs(v[i]) * std::sqrt(w2[i]);
                lhs += (r <= 1.0) ? vw / std::pow(r, 2.0 - delta) : vw / std::pow(r, 2.0 + delta);
            }
            double rhs = mc_norm(sh, v2, McKind::Xdot).value * mc_norm(sh, w2, McKind::Ydot).value;
            acc["pair_xdot_ydot"].update(lhs * vol, 9.0 / delta * rhs, fi);
        }

        // magnetic Hardy at two centers
        {
            Point ys[2] = {Point{}, Point{}};
            ys[1][0] = 1.0;
            ys[1][1] = 0.5;
            double gnorm = std::sqrt(op.magnetic_gradient_norm2(v));
            for (const Point& y : ys) {
                double lhs = 0;
                for (int i = 0; i < N; ++i) {
                    Point x = g.coords(i);
                    double d2 = 0;
                    for (int k = 0; k < n; ++k) d2 += sq(x[k] - y[k]);
                    lhs += v2[i] / std::max(d2, 1e-24);
                }
                acc["hardy_magnetic"].update(std::sqrt(lhs * vol), 2.0 / (n - 2.0) * gnorm, fi);
            }
        }

        acc["inv_weight_y"].update(sq(mc_norm(sh, v2_invx2, McKind::Y).value),
                                   6.0 * y2_g + 3.0 * x2, fi);

        {
            double lhs = 0;
            for (int i = 0; i < N; ++i) {
                double r = std::max<double>(g.radius(i), 1e-12);
                double t = gb_abs[i] * std::abs(v[i]);
                lhs += (r <= 1.0) ? t / r : t / std::pow(r, 2.0 + delta);
            }
            acc["grad_pair_xy"].update(lhs * vol, 9.0 / delta * (y2_g + x2), fi);
        }

        {
            std::vector<double> surf;
            sh.surface_sums(v2, surf);
            double sup_gt1 = 0;
            for (std::size_t k = 0; k < radii.size(); ++k)
                if (radii[k] > 1.0) sup_gt1 = std::max(sup_gt1, surf[k] / sq(radii[k]));
            acc["x_from_tail_and_grad"].update(x2, 4.0 * sup_gt1 + 13.0 * y2_g, fi);
        }

        {
            double gradb = std::sqrt(op.magnetic_gradient_norm2(v));
            // plain central gradient and |b v|
            double bvec[kMaxDim];
            double bv2 = 0;
            Field vplain = v;  // reuse magnetic gradient with b = 0 via manual loop
            double plain2 = 0;
            for (int ord = 0; ord < N; ++ord) {
                Point x = g.coords(ord);
                op.coeffs().magnetic(x, bvec);
                double bn2 = 0;
                for (int k = 0; k < n; ++k) bn2 += bvec[k] * bvec[k];
                bv2 += bn2 * v2[ord];
            }
            for (int k = 0; k < n; ++k) {
                for (int ord = 0; ord < N; ++ord) {
                    int np = g.neighbor(ord, k, +1), nm = g.neighbor(ord, k, -1);
                    cplx d = ((np >= 0 ? v[np] : cplx(0)) - (nm >= 0 ? v[nm] : cplx(0))) /
                             (2.0 * g.h());
                    plain2 += std::norm(d);
                }
            }
            plain2 *= vol;
            bv2 *= vol;
            double bnorm = std::sqrt(bv2), plain = std::sqrt(plain2);
            acc["equivmag_forward"].update(gradb, plain + bnorm, fi);
            acc["equivmag_backward"].update(plain, gradb + bnorm, fi);

            // weighted version at s = 1/2 with measured S_b
            double s = 0.5;
            double wg = 0, wp = 0, wv = 0;
            for (int k = 0; k < n; ++k)
                for (int ord = 0; ord < N; ++ord) {
                    double br2 = 1.0 + sq(g.radius(ord));
                    double wgt = std::pow(br2, -s);
                    wg += wgt * std::norm(gr[k][ord]);
                }
            for (int ord = 0; ord < N; ++ord) {
                double br2 = 1.0 + sq(g.radius(ord));
                wv += std::pow(br2, -s - 1.0) * v2[ord];
            }
            for (int k = 0; k < n; ++k)
                for (int ord = 0; ord < N; ++ord) {
                    int np = g.neighbor(ord, k, +1), nm = g.neighbor(ord, k, -1);
                    cplx d = ((np >= 0 ? v[np] : cplx(0)) - (nm >= 0 ? v[nm] : cplx(0))) /
                             (2.0 * g.h());
                    wp += std::pow(1.0 + sq(g.radius(ord)), -s) * std::norm(d);
                }
            double lhs = std::sqrt(wg * vol) + std::sqrt(wv * vol);
            double rhs = (1.0 + Sb) * (std::sqrt(wp * vol) + std::sqrt(wv * vol));
            acc["equivmagw_forward"].update(lhs, rhs, fi);
        }
    }

    std::vector<LemmaResult> out;
    for (auto& [name, a] : acc) {
        LemmaResult r;
        r.lemma = name;
        r.lhs = a.worst_lhs;
        r.rhs = a.worst_rhs;
        r.constant = constant.at(name);
        r.worst_field = a.worst_field;
        r.holds = a.worst_ratio <= (1.0 + eps_h) || a.worst_ratio < 0;
        out.push_back(r);
    }
    return out;
}

// ---- equivalence ratios -------------------------------------------------------

RatioInterval equiv_h1_ratio(const DiscreteOperator& op, const std::vector<Field>& family) {
    RatioInterval ri{1e300, 0};
    for (const auto& v : family) {
        double q = op.quadratic_form(v);
        double gn = op.flux_gradient_norm2(v);
        if (gn <= 0) continue;
        double r = std::sqrt(std::max(q, 0.0) / gn);
        ri.min_ratio = std::min(ri.min_ratio, r);
        ri.max_ratio = std::max(ri.max_ratio, r);
    }
    return ri;
}

RatioInterval homsob_ratio(const DiscreteOperator& op, const std::vector<Field>& family,
                           double s) {
    RatioInterval ri{1e300, 0};
    for (const auto& v : family) {
        double lhs;
        if (std::abs(s - 1.0) < 1e-12) {
            lhs = std::sqrt(std::max(op.quadratic_form(v), 0.0));
        } else if (std::abs(s - 0.5) < 1e-12) {
            // ||(-L)^{1/4} v||^2 = <(-L)^{1/2} v, v>
            Field w = op.fractional_apply(v, 0.5);
            lhs = std::sqrt(std::max(std::real(w.dot(v)) * op.grid().cell_volume(), 0.0));
        } else {
            throw std::invalid_argument("homsob_ratio: s must be 1/2 or 1");
        }
        double rhs = sobolev_norm(op.grid(), v, s);
        if (rhs <= 0) continue;
        double r = lhs / rhs;
        ri.min_ratio = std::min(ri.min_ratio, r);
        ri.max_ratio = std::max(ri.max_ratio, r);
    }
    return ri;
}

// ---- virial -----------------------------------------------------------------

double virial_momentum(const DiscreteOperator& op, const RadialWeight& w, const Field& u) {
    const Grid& g = op.grid();
    const int n = g.dim();
    std::array<Field, kMaxDim> gr;
    op.magnetic_gradient(u, gr);
    double amat[kMaxDim][kMaxDim];
    double acc = 0;
    for (int ord = 0; ord < g.interior_size(); ++ord) {
        Point x = g.coords(ord);
        double r = g.radius(ord);
        if (r < 1e-12) continue;
        WeightTable t = w.table(r);
        op.coeffs().metric(x, amat);
        cplx s(0, 0);
        for (int j = 0; j < n; ++j) {
            double gpsi_aj = 0;  // (a grad psi)_j = a_{jk} p1 xh_k
            for (int k = 0; k < n; ++k) gpsi_aj += amat[j][k] * t.p1 * (x[k] / r);
            s += gpsi_aj * std::conj(gr[j][ord]);
        }
        acc += std::imag(s * u[ord]);
    }
    return acc * g.cell_volume();
}

VirialResidual virial_residual(const DiscreteOperator& op, const RadialWeight& w,
                               const ShellPartition& sh, const VirialSample& smp) {
    const Grid& g = op.grid();
    const CoefficientSet& cs = op.coeffs();
    const int n = g.dim();
    const int N = g.interior_size();
    const double vol = g.cell_volume();
    VirialResidual out;

    out.lhs_dt = (virial_momentum(op, w, smp.u_plus) - virial_momentum(op, w, smp.u_minus)) /
                 (2.0 * smp.dt);

    const Field& u = smp.u;
    std::array<Field, kMaxDim> gr;
    op.magnetic_gradient(u, gr);
    Field ut = (smp.u_plus - smp.u_minus) / (2.0 * smp.dt);

    double g1 = 0, g2 = 0, g3 = 0, g4 = 0, g5 = 0;
    // divergence-group vector field
    std::array<Field, kMaxDim> G;
    for (int k = 0; k < n; ++k) G[k] = Field::Zero(N);

    for (int ord = 0; ord < N; ++ord) {
        Point x = g.coords(ord);
        double r = g.radius(ord);
        if (r < 1e-12) continue;
        CoefficientValues cv = eval_coefficients(cs, x);
        WeightTable t = w.table(r);
        double u2 = std::norm(u[ord]);

        double xh[kMaxDim];
        for (int k = 0; k < n; ++k) xh[k] = x[k] / r;

        // group 1: -1/2 (S + R)|u|^2 (smooth part)
        BilapSplit split = bilap_split(cs, x, w);
        g1 += -0.5 * (split.S + split.R_rem) * u2;

        // group 2: alpha_{lm} grad_m conj(grad_l)
        double alpha[kMaxDim][kMaxDim];
        alpha_matrix(cs, x, w, alpha);
        for (int l = 0; l < n; ++l)
            for (int m = 0; m < n; ++m)
                g2 += alpha[l][m] * std::real(gr[m][ord] * std::conj(gr[l][ord]));

        // group 3: -a(grad psi, grad c)|u|^2
        double agc = 0;
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) agc += cv.a(j, k) * t.p1 * xh[k] * cv.grad_c[j];
        g3 += -agc * u2;

        // group 4: 2 Im(a_{jk} grad_k (db)_{jl} a_{lm} d_m psi conj u)
        cplx mag(0, 0);
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    for (int m = 0; m < n; ++m)
                        mag += cv.a(j, k) * gr[k][ord] * cv.db(j, l) * cv.a(l, m) * t.p1 * xh[m];
        g4 += 2.0 * std::imag(mag * std::conj(u[ord]));

        // group 5: A psi [f(u) conj u - 2F]
        double apsi = a_psi(cs, x, w);
        if (!smp.linear) g5 += apsi * cs.nl.bracket(u[ord]);

        // divergence group vector
        double gap[kMaxDim];
        grad_a_psi(cs, x, w, gap);
        cplx multiplier = apsi * std::conj(u[ord]);
        for (int l = 0; l < n; ++l) {
            double apl = 0;
            for (int m = 0; m < n; ++m) apl += cv.a(l, m) * t.p1 * xh[m];
            multiplier += 2.0 * apl * std::conj(gr[l][ord]);
        }
        double agg = 0;  // a(grad_b u, grad_b u)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                agg += cv.a(j, k) * std::real(gr[k][ord] * std::conj(gr[j][ord]));
        double Fu = smp.linear ? 0.0 : cs.nl.F(std::abs(u[ord]));
        double im_ut_u = std::imag(std::conj(ut[ord]) * u[ord]);
        for (int j = 0; j < n; ++j) {
            cplx aguj(0, 0);
            double agpj = 0;
            for (int k = 0; k < n; ++k) {
                aguj += cv.a(j, k) * gr[k][ord];
                agpj += cv.a(j, k) * t.p1 * xh[k];
            }
            cplx Qj = aguj * multiplier;
            double akgap = 0;
            for (int k = 0; k < n; ++k) akgap += cv.a(j, k) * gap[k];
            Qj += -0.5 * akgap * u2 - agpj * (cv.c * u2 + agg);
            G[j][ord] = -std::real(Qj) + 2.0 * Fu * agpj + im_ut_u * agpj;
        }
    }

    // distributional shell term of group 1: -1/2 * coeff * \oint ahat^2 |u|^2 dS
    double shell_term = 0;
    if (w.shell_radius() > 0) {
        RealField dens(N);
        double amat[kMaxDim][kMaxDim];
        for (int ord = 0; ord < N; ++ord) {
            Point x = g.coords(ord);
            double r = g.radius(ord);
            if (r < 1e-12) {
                dens[ord] = 0;
                continue;
            }
            cs.metric(x, amat);
            double ah = 0;
            for (int l = 0; l < n; ++l)
                for (int m = 0; m < n; ++m) ah += amat[l][m] * (x[l] / r) * (x[m] / r);
            dens[ord] = sq(ah) * std::norm(u[ord]);
        }
        shell_term = -0.5 * w.shell_coeff() * sh.surface_pairing(dens, w.shell_radius());
    }

    out.groups["bilap"] = g1 * vol + shell_term;
    out.groups["curvature"] = g2 * vol;
    out.groups["electric"] = g3 * vol;
    out.groups["magnetic"] = g4 * vol;
    out.groups["nonlinear"] = g5 * vol;
    out.rhs_sum = out.groups["bilap"] + out.groups["curvature"] + out.groups["electric"] +
                  out.groups["magnetic"] + out.groups["nonlinear"];

    // discrete divergence of the flux vector (central differences, zero ghosts)
    double div = 0;
    for (int j = 0; j < n; ++j)
        for (int ord = 0; ord < N; ++ord) {
            int np = g.neighbor(ord, j, +1), nm = g.neighbor(ord, j, -1);
            double d = (((np >= 0) ? std::real(G[j][np]) : 0.0) -
                        ((nm >= 0) ? std::real(G[j][nm]) : 0.0)) /
                       (2.0 * g.h());
            div += d;
        }
    out.divergence = div * vol;
    out.residual = out.lhs_dt - out.rhs_sum - out.divergence;
    return out;
}

// ---- scattering diagnostics ----------------------------------------------------

StrichartzCouple admissible_check(Rational p, Rational q, int n) {
    StrichartzCouple sc;
    sc.p = p;
    sc.q = q;
    // 2/p + n/q = n/2, p >= 2 (p = infinity encoded as den == 0)
    bool p_inf = (p.den == 0);
    Rational lhs = p_inf ? Rational(0, 1) : Rational(2 * p.den, p.num);
    Rational qq(static_cast<std::int64_t>(n) * q.den, q.num);
    lhs = lhs + qq;
    Rational target(n, 2);
    bool scaling = (lhs == target);
    bool p_ok = p_inf || (p.num >= 2 * p.den);
    sc.admissible = scaling && p_ok;
    if (!p_inf && p.num == 2 * p.den && n > 2) {
        Rational qend(2 * n, n - 2);
        sc.endpoint = (q == qend);
        if (sc.endpoint) sc.admissible = true;
    }
    return sc;
}

double strichartz_norm(const SeriesTable& series, const std::string& lq_col, double p) {
    const auto& t = series.times;
    const auto& v = series.cols.at(lq_col);
    if (std::isinf(p)) {
        double m = 0;
        for (double x : v) m = std::max(m, x);
        return m;
    }
    double acc = 0;
    for (std::size_t i = 1; i < t.size(); ++i)
        acc += 0.5 * (t[i] - t[i - 1]) * (std::pow(v[i - 1], p) + std::pow(v[i], p));
    return std::pow(acc, 1.0 / p);
}

DecayVerdict scattering_verdict(const SeriesTable& series, const std::string& col, double r,
                                int n) {
    DecayVerdict d;
    d.r = r;
    d.r_admissible = (r > 2.0) && (n <= 2 || r < 2.0 * n / (n - 2.0));
    const auto& v = series.cols.at(col);
    double mx = 0;
    for (double x : v) mx = std::max(mx, x);
    d.decay_factor = mx > 0 ? v.back() / mx : 0.0;
    return d;
}

double h1_norm(const DiscreteOperator& op, const Field& u) {
    return std::sqrt(mass(u, op.grid().cell_volume()) + std::max(op.quadratic_form(u), 0.0));
}

AsymptoticState asymptotic_state(const DiscreteOperator& op, const std::vector<Field>& snapshots,
                                 const std::vector<double>& times, double dt_linear) {
    if (snapshots.size() != times.size() || snapshots.empty())
        throw std::invalid_argument("asymptotic_state: snapshot/time mismatch");
    AsymptoticState as;
    as.times = times;
    double T = times.back();
    // w_k = e^{i (t_k - T) L} u(t_k); increments agree with those of
    // v_k = e^{i t_k L} u(t_k) in the mass + quadratic-form norm
    std::vector<Field> w;
    w.reserve(snapshots.size());
    for (std::size_t k = 0; k < snapshots.size(); ++k)
        w.push_back(op.propagate(snapshots[k], times[k] - T, dt_linear));
    for (std::size_t k = 0; k + 1 < w.size(); ++k)
        as.increment_h1.push_back(h1_norm(op, Field(w[k + 1] - w[k])));
    as.u_plus = op.propagate(w.back(), T, dt_linear);
    return as;
}

}  // namespace mnls
