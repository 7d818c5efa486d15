#include "mnls/fftops.hpp"

#include <fftw3.h>

#include <cmath>
#include <stdexcept>

namespace mnls {

FftBox::FftBox(int dim, int points_per_axis) : n_(dim), m_(points_per_axis) {
    size_ = 1;
    for (int k = 0; k < n_; ++k) size_ *= m_;
    buf_ = static_cast<cplx*>(fftw_malloc(sizeof(cplx) * size_));
    if (!buf_) throw std::bad_alloc();
    std::vector<int> dims(n_, m_);
    plan_fwd_ = fftw_plan_dft(n_, dims.data(), reinterpret_cast<fftw_complex*>(buf_),
                              reinterpret_cast<fftw_complex*>(buf_), FFTW_FORWARD, FFTW_ESTIMATE);
    plan_bwd_ = fftw_plan_dft(n_, dims.data(), reinterpret_cast<fftw_complex*>(buf_),
                              reinterpret_cast<fftw_complex*>(buf_), FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!plan_fwd_ || !plan_bwd_) throw std::runtime_error("fft: plan creation failed");
}

FftBox::~FftBox() {
    fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
    fftw_free(buf_);
}

void FftBox::forward() { fftw_execute(static_cast<fftw_plan>(plan_fwd_)); }
void FftBox::backward() { fftw_execute(static_cast<fftw_plan>(plan_bwd_)); }

namespace {

// |xi|^2 for the flat spectral index
double xi2_at(const FftBox& box, std::int64_t f, double dxi) {
    double s = 0;
    for (int k = 0; k < box.dim(); ++k) {
        double x = dxi * box.folded(box.axis_index(f, k));
        s += x * x;
    }
    return s;
}

}  // namespace

double sobolev_norm(const Grid& g, const Field& u, double s) {
    FftBox box(g.dim(), g.points_per_axis());
    Eigen::VectorXcd full;
    g.scatter(u, full);
    std::copy(full.data(), full.data() + full.size(), box.data());
    box.forward();
    double dxi = M_PI / g.box();
    double hn = g.cell_volume();
    double inv = std::pow(1.0 / (2.0 * g.box()), g.dim());
    double acc = 0;
    for (std::int64_t f = 0; f < box.size(); ++f) {
        double x2 = xi2_at(box, f, dxi);
        if (x2 == 0.0 && s < 0) continue;
        acc += std::pow(x2, s) * std::norm(box.data()[f] * hn);
    }
    return std::sqrt(acc * inv);
}

double spectrum_weighted_norm2(const Grid& g, const RealField& rho, double p, int pad) {
    const int n = g.dim();
    const int M = g.points_per_axis();
    const int P = pad * M;
    FftBox box(n, P);
    std::fill(box.data(), box.data() + box.size(), cplx(0));
    for (int ord = 0; ord < g.interior_size(); ++ord) {
        std::int64_t src = g.full_index(ord);
        std::int64_t dst = 0, mul = 1, rem = src;
        for (int k = 0; k < n; ++k) {
            dst += (rem % M) * mul;
            rem /= M;
            mul *= P;
        }
        box.data()[dst] = rho[ord];
    }
    box.forward();
    double dxi = M_PI / (g.box() * pad);
    double hn = g.cell_volume();
    double inv = std::pow(1.0 / (2.0 * g.box() * pad), n);
    double acc = 0;
    for (std::int64_t f = 0; f < box.size(); ++f) {
        double x2 = xi2_at(box, f, dxi);
        if (x2 == 0.0) continue;
        acc += std::pow(x2, p / 2.0) * std::norm(box.data()[f] * hn);
    }
    return acc * inv;
}

double spectral_gradient_norm2(const Grid& g, const Field& u) {
    double v = sobolev_norm(g, u, 1.0);
    return v * v;
}

void free_drift(const Grid& g, Field& u, double tau, FftBox& box) {
    if (box.dim() != g.dim() || box.m() != g.points_per_axis())
        throw std::invalid_argument("free_drift: workspace mismatch");
    Eigen::VectorXcd full;
    g.scatter(u, full);
    std::copy(full.data(), full.data() + full.size(), box.data());
    box.forward();
    double dxi = M_PI / g.box();
    for (std::int64_t f = 0; f < box.size(); ++f) {
        double x2 = xi2_at(box, f, dxi);
        box.data()[f] *= std::exp(cplx(0.0, x2 * tau));
    }
    box.backward();
    double inv = 1.0 / double(box.size());
    for (std::int64_t f = 0; f < box.size(); ++f) box.data()[f] *= inv;
    Eigen::Map<Eigen::VectorXcd> m(box.data(), box.size());
    full = m;
    g.gather(full, u);
}

double kernel_cell_average(int n, double h, double p) {
    // integral of |z|^{-p} over [-h/2, h/2]^n by dyadic shells: midpoint rule
    // on the annular region between nested cubes, recursed toward the origin
    if (p >= n) throw std::invalid_argument("kernel cell average diverges for p >= n");
    auto shell_integral = [&](double a) {
        // integral over [-a,a]^n minus [-a/2,a/2]^n, midpoint grid 12^n
        const int q = (n <= 3) ? 16 : 10;
        double dz = 2.0 * a / q;
        double acc = 0;
        std::vector<int> idx(n, 0);
        while (true) {
            double r2 = 0;
            bool inner = true;
            for (int k = 0; k < n; ++k) {
                double z = -a + (idx[k] + 0.5) * dz;
                r2 += z * z;
                if (std::abs(z) > a / 2.0) inner = false;
            }
            if (!inner) acc += std::pow(r2, -p / 2.0);
            int k = 0;
            while (k < n && ++idx[k] == q) idx[k++] = 0;
            if (k == n) break;
        }
        return acc * std::pow(dz, n);
    };
    double total = 0;
    double a = h / 2.0;
    for (int lev = 0; lev < 60; ++lev) {
        double s = shell_integral(a);
        total += s;
        if (s < 1e-16 * total && lev > 4) break;
        a /= 2.0;
    }
    return total / std::pow(h, n);
}

InteractionKernel::InteractionKernel(const Grid& g, double p) : grid_(&g), p_(p) {
    const int n = g.dim();
    const int M = g.points_per_axis();
    k_center_ = kernel_cell_average(n, g.h(), p);
    box_ = std::make_unique<FftBox>(n, 2 * M);
    // kernel at lattice offsets, embedded periodically in the padded box
    kernel_hat_.assign(box_->size(), cplx(0));
    const int P = 2 * M;
    std::vector<int> idx(n, 0);
    std::int64_t f = 0;
    while (true) {
        double r2 = 0;
        bool valid = true;
        for (int k = 0; k < n; ++k) {
            int d = idx[k] < M ? idx[k] : idx[k] - P;  // offset in [-M, M)
            if (d == -M) valid = false;                // unused padding row
            r2 += sq(d * g.h());
        }
        if (valid)
            kernel_hat_[f] = (r2 == 0.0) ? cplx(k_center_) : cplx(std::pow(r2, -p / 2.0));
        int k = 0;
        while (k < n && ++idx[k] == P) idx[k++] = 0;
        ++f;
        if (k == n) break;
    }
    std::copy(kernel_hat_.begin(), kernel_hat_.end(), box_->data());
    box_->forward();
    std::copy(box_->data(), box_->data() + box_->size(), kernel_hat_.begin());
}

double InteractionKernel::evaluate(const RealField& rho) {
    const Grid& g = *grid_;
    const int n = g.dim();
    const int M = g.points_per_axis();
    const int P = 2 * M;
    // scatter rho into the padded box (first M entries per axis)
    std::fill(box_->data(), box_->data() + box_->size(), cplx(0));
    for (int ord = 0; ord < g.interior_size(); ++ord) {
        std::int64_t src = g.full_index(ord);
        std::int64_t dst = 0, mul = 1, rem = src;
        for (int k = 0; k < n; ++k) {
            dst += (rem % M) * mul;
            rem /= M;
            mul *= P;
        }
        box_->data()[dst] = rho[ord];
    }
    box_->forward();
    for (std::int64_t f = 0; f < box_->size(); ++f) box_->data()[f] *= kernel_hat_[f];
    box_->backward();
    double invsize = 1.0 / double(box_->size());
    double acc = 0;
    for (int ord = 0; ord < g.interior_size(); ++ord) {
        std::int64_t src = g.full_index(ord);
        std::int64_t dst = 0, mul = 1, rem = src;
        for (int k = 0; k < n; ++k) {
            dst += (rem % M) * mul;
            rem /= M;
            mul *= P;
        }
        acc += rho[ord] * std::real(box_->data()[dst]) * invsize;
    }
    return acc * std::pow(g.cell_volume(), 2);
}

double InteractionKernel::evaluate_direct(const RealField& rho, bool include_self) const {
    const Grid& g = *grid_;
    const int n = g.dim();
    if (g.interior_size() > 4096 + 1)
        if (g.interior_size() > 65536)
            throw std::invalid_argument("direct interaction oracle: grid too large");
    double acc = 0;
    for (int i = 0; i < g.interior_size(); ++i) {
        Point xi = g.coords(i);
        for (int j = 0; j < g.interior_size(); ++j) {
            if (i == j) {
                if (include_self) acc += rho[i] * rho[i] * k_center_;
                continue;
            }
            Point xj = g.coords(j);
            double r2 = 0;
            for (int k = 0; k < n; ++k) r2 += sq(xi[k] - xj[k]);
            acc += rho[i] * rho[j] * std::pow(r2, -p_ / 2.0);
        }
    }
    return acc * std::pow(g.cell_volume(), 2);
}

}  // namespace mnls
