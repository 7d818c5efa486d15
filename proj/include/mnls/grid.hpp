#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mnls {

using cplx = std::complex<double>;
using Field = Eigen::VectorXcd;
using RealField = Eigen::VectorXd;

constexpr int kMaxDim = 4;
using Point = std::array<double, kMaxDim>;

struct Obstacle {
    enum class Kind { none, ball, mask } kind = Kind::none;
    Point center{};
    double radius = 0.0;
    // user mask: true = excluded from the domain
    std::function<bool(const Point&, int dim)> mask;
};

// Boundary-adjacent cell (next to the obstacle) with an estimate of the
// exterior normal of the domain (pointing into the obstacle).
struct BoundaryCell {
    int ordinal;
    Point normal;
    bool analytic_normal;
};

// Uniform tensor mesh on [-box, box]^n, cell-centered: x_i = -box + (i+1/2) h,
// h = 2 box / m. All m^n cells are interior unless excluded by the obstacle.
// Fields are zero outside the interior set (Dirichlet).
class Grid {
  public:
    Grid(int dim, double box, int m, Obstacle obstacle = {});

    int dim() const { return n_; }
    double box() const { return box_; }
    int points_per_axis() const { return m_; }
    double h() const { return h_; }
    double cell_volume() const { return cell_vol_; }
    bool plumbing_only() const { return n_ < 3; }
    const Obstacle& obstacle() const { return obstacle_; }

    std::int64_t full_size() const { return full_size_; }
    int interior_size() const { return static_cast<int>(cells_.size()); }

    // full-lattice index <-> interior ordinal (-1 if not interior)
    int ordinal(std::int64_t full) const { return ordinal_[full]; }
    std::int64_t full_index(int ord) const { return cells_[ord]; }

    Point coords(int ord) const;
    double radius(int ord) const { return radius_[ord]; }

    // neighbor ordinal in +/- direction along axis; -1 = ghost (value zero)
    int neighbor(int ord, int axis, int dir) const {
        return nbr_[static_cast<std::size_t>(ord) * 2 * n_ + 2 * axis + (dir > 0 ? 1 : 0)];
    }

    const std::vector<BoundaryCell>& obstacle_boundary() const { return boundary_; }

    // mass fraction within `band` cells of the outer box faces
    double boundary_band_fraction(const Field& u, int band = 2) const;

    Field zeros() const { return Field::Zero(interior_size()); }
    // scatter interior values into the full box lattice (zero extension)
    void scatter(const Field& u, Eigen::VectorXcd& full) const;
    void gather(const Eigen::VectorXcd& full, Field& u) const;

    std::string id() const;

  private:
    int n_;
    double box_;
    int m_;
    double h_;
    double cell_vol_;
    Obstacle obstacle_;
    std::int64_t full_size_;
    std::array<std::int64_t, kMaxDim> stride_{};
    std::vector<int> ordinal_;
    std::vector<std::int64_t> cells_;
    std::vector<float> radius_;
    std::vector<int> nbr_;
    std::vector<BoundaryCell> boundary_;
};

// Radial shells: each radius R_k carries the annulus {| |x| - R_k | <= h/2}
// used as the discrete realization of the surface measure on {|x| = R_k}
// (annulus sum * h^n / h estimates the surface integral), plus cumulative
// balls {|x| <= R_k}. Radii are log-spaced in [2h, r_max] by default; the
// floor R >= 2h is recorded as a caveat by every consumer.
class ShellPartition {
  public:
    ShellPartition(const Grid& g, int count);
    ShellPartition(const Grid& g, std::vector<double> radii);

    const std::vector<double>& radii() const { return radii_; }
    const Grid& grid() const { return *grid_; }
    int count() const { return static_cast<int>(radii_.size()); }

    // per-shell surface sums: out[k] ~= \int_{|x|=R_k} w dS
    void surface_sums(const RealField& w, std::vector<double>& out) const;
    // cumulative ball sums: out[k] = sum_{|x| <= R_k} w * h^n
    void ball_sums(const RealField& w, std::vector<double>& out) const;

    // pairing with the surface delta at radius R: \int_{|x|=R} w dS
    double surface_pairing(const RealField& w, double R) const;

    int annulus_count(int k) const;  // number of cells in shell k

  private:
    void init();
    const Grid* grid_;
    std::vector<double> radii_;
    // per-cell: half-open shell range [lo, hi) whose annuli contain the cell,
    // and the first radius index with R_k >= |x| (count() if none)
    std::vector<int> cell_lo_, cell_hi_, cell_ball_;
};

inline double sq(double v) { return v * v; }
double field_norm2(const Field& u, double cell_vol);  // squared L2 norm

}  // namespace mnls
