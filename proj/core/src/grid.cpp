#include <porofss/grid.hpp>

#include <porofss/error.hpp>

#include <string>

namespace porofss {

namespace {
const char* plane_name(int p) {
  static const char* names[6] = {"-x", "+x", "-y", "+y", "-z", "+z"};
  return names[p];
}
} // namespace

Grid::Grid(int nx, int ny, int nz, double hx, double hy, double hz,
           const BoundarySpec& bc)
    : nx_(nx), ny_(ny), nz_(nz), h_{hx, hy, hz} {
  if (nx < 1 || ny < 1 || nz < 1) {
    throw ConfigError("grid: cell counts must be >= 1, got (" +
                      std::to_string(nx) + ", " + std::to_string(ny) + ", " +
                      std::to_string(nz) + ")");
  }
  if (!(hx > 0.0) || !(hy > 0.0) || !(hz > 0.0)) {
    throw ConfigError("grid: spacings must be > 0, got (" +
                      std::to_string(hx) + ", " + std::to_string(hy) + ", " +
                      std::to_string(hz) + ")");
  }
  for (int p = 0; p < 6; ++p) {
    if (!bc.plane[p].has_value()) {
      throw ConfigError(std::string("grid: boundary plane ") + plane_name(p) +
                        " is untagged; every plane needs a flow and a "
                        "mechanics condition");
    }
    bc_[p] = *bc.plane[p];
  }
  nfx_ = (nx_ + 1) * ny_ * nz_;
  nfy_ = nx_ * (ny_ + 1) * nz_;
  nfz_ = nx_ * ny_ * (nz_ + 1);
}

double Grid::face_area(int axis) const {
  switch (axis) {
    case 0: return h_[1] * h_[2];
    case 1: return h_[0] * h_[2];
    case 2: return h_[0] * h_[1];
    default: throw Error("face_area: axis out of range");
  }
}

void Grid::check_cell(int c) const {
  if (c < 0 || c >= num_cells()) {
    throw Error("grid: cell index " + std::to_string(c) +
                " out of range [0, " + std::to_string(num_cells()) + ")");
  }
}

void Grid::check_face(int f) const {
  if (f < 0 || f >= num_faces()) {
    throw Error("grid: face index " + std::to_string(f) +
                " out of range [0, " + std::to_string(num_faces()) + ")");
  }
}

int Grid::cell_index(int i, int j, int k) const {
  if (i < 0 || i >= nx_ || j < 0 || j >= ny_ || k < 0 || k >= nz_) {
    throw Error("grid: cell coords (" + std::to_string(i) + ", " +
                std::to_string(j) + ", " + std::to_string(k) +
                ") out of range");
  }
  return i + nx_ * (j + ny_ * k);
}

std::array<int, 3> Grid::cell_coords(int c) const {
  check_cell(c);
  const int i = c % nx_;
  const int j = (c / nx_) % ny_;
  const int k = c / (nx_ * ny_);
  return {i, j, k};
}

Vec3 Grid::cell_center(int c) const {
  const auto [i, j, k] = cell_coords(c);
  return Vec3((i + 0.5) * h_[0], (j + 0.5) * h_[1], (k + 0.5) * h_[2]);
}

int Grid::node_index(int i, int j, int k) const {
  if (i < 0 || i > nx_ || j < 0 || j > ny_ || k < 0 || k > nz_) {
    throw Error("grid: node coords out of range");
  }
  return i + (nx_ + 1) * (j + (ny_ + 1) * k);
}

Vec3 Grid::node_coord(int n) const {
  if (n < 0 || n >= num_nodes()) {
    throw Error("grid: node index out of range");
  }
  const int i = n % (nx_ + 1);
  const int j = (n / (nx_ + 1)) % (ny_ + 1);
  const int k = n / ((nx_ + 1) * (ny_ + 1));
  return Vec3(i * h_[0], j * h_[1], k * h_[2]);
}

std::array<int, 8> Grid::cell_nodes(int c) const {
  const auto [i, j, k] = cell_coords(c);
  std::array<int, 8> n{};
  int l = 0;
  for (int dk = 0; dk <= 1; ++dk)
    for (int dj = 0; dj <= 1; ++dj)
      for (int di = 0; di <= 1; ++di)
        n[l++] = node_index(i + di, j + dj, k + dk);
  return n;
}

int Grid::face_axis(int f) const {
  check_face(f);
  if (f < nfx_) return 0;
  if (f < nfx_ + nfy_) return 1;
  return 2;
}

Vec3 Grid::face_centroid(int f) const {
  check_face(f);
  if (f < nfx_) {
    const int i = f % (nx_ + 1);
    const int j = (f / (nx_ + 1)) % ny_;
    const int k = f / ((nx_ + 1) * ny_);
    return Vec3(i * h_[0], (j + 0.5) * h_[1], (k + 0.5) * h_[2]);
  }
  if (f < nfx_ + nfy_) {
    const int g = f - nfx_;
    const int i = g % nx_;
    const int j = (g / nx_) % (ny_ + 1);
    const int k = g / (nx_ * (ny_ + 1));
    return Vec3((i + 0.5) * h_[0], j * h_[1], (k + 0.5) * h_[2]);
  }
  const int g = f - nfx_ - nfy_;
  const int i = g % nx_;
  const int j = (g / nx_) % ny_;
  const int k = g / (nx_ * ny_);
  return Vec3((i + 0.5) * h_[0], (j + 0.5) * h_[1], k * h_[2]);
}

std::array<int, 4> Grid::face_nodes(int f) const {
  check_face(f);
  if (f < nfx_) {
    const int i = f % (nx_ + 1);
    const int j = (f / (nx_ + 1)) % ny_;
    const int k = f / ((nx_ + 1) * ny_);
    return {node_index(i, j, k), node_index(i, j + 1, k),
            node_index(i, j, k + 1), node_index(i, j + 1, k + 1)};
  }
  if (f < nfx_ + nfy_) {
    const int g = f - nfx_;
    const int i = g % nx_;
    const int j = (g / nx_) % (ny_ + 1);
    const int k = g / (nx_ * (ny_ + 1));
    return {node_index(i, j, k), node_index(i + 1, j, k),
            node_index(i, j, k + 1), node_index(i + 1, j, k + 1)};
  }
  const int g = f - nfx_ - nfy_;
  const int i = g % nx_;
  const int j = (g / nx_) % ny_;
  const int k = g / (nx_ * ny_);
  return {node_index(i, j, k), node_index(i + 1, j, k),
          node_index(i, j + 1, k), node_index(i + 1, j + 1, k)};
}

Grid::FaceCells Grid::face_cells(int f) const {
  check_face(f);
  FaceCells fc;
  if (f < nfx_) {
    const int i = f % (nx_ + 1);
    const int j = (f / (nx_ + 1)) % ny_;
    const int k = f / ((nx_ + 1) * ny_);
    if (i > 0) fc.minus = cell_index(i - 1, j, k);
    if (i < nx_) fc.plus = cell_index(i, j, k);
    return fc;
  }
  if (f < nfx_ + nfy_) {
    const int g = f - nfx_;
    const int i = g % nx_;
    const int j = (g / nx_) % (ny_ + 1);
    const int k = g / (nx_ * (ny_ + 1));
    if (j > 0) fc.minus = cell_index(i, j - 1, k);
    if (j < ny_) fc.plus = cell_index(i, j, k);
    return fc;
  }
  const int g = f - nfx_ - nfy_;
  const int i = g % nx_;
  const int j = (g / nx_) % ny_;
  const int k = g / (nx_ * ny_);
  if (k > 0) fc.minus = cell_index(i, j, k - 1);
  if (k < nz_) fc.plus = cell_index(i, j, k);
  return fc;
}

int Grid::face_plane(int f) const {
  check_face(f);
  if (f < nfx_) {
    const int i = f % (nx_ + 1);
    if (i == 0) return 0;
    if (i == nx_) return 1;
    return -1;
  }
  if (f < nfx_ + nfy_) {
    const int j = ((f - nfx_) / nx_) % (ny_ + 1);
    if (j == 0) return 2;
    if (j == ny_) return 3;
    return -1;
  }
  const int k = (f - nfx_ - nfy_) / (nx_ * ny_);
  if (k == 0) return 4;
  if (k == nz_) return 5;
  return -1;
}

bool Grid::face_is_boundary(int f) const { return face_plane(f) >= 0; }

const FaceBoundary& Grid::face_boundary(int f) const {
  const int p = face_plane(f);
  if (p < 0) {
    throw Error("grid: face " + std::to_string(f) +
                " is interior and carries no boundary data");
  }
  return bc_[p];
}

std::array<Grid::CellFace, 6> Grid::cell_to_faces(int c) const {
  const auto [i, j, k] = cell_coords(c);
  const auto fx = [&](int ii) { return ii + (nx_ + 1) * (j + ny_ * k); };
  const auto fy = [&](int jj) { return nfx_ + i + nx_ * (jj + (ny_ + 1) * k); };
  const auto fz = [&](int kk) { return nfx_ + nfy_ + i + nx_ * (j + ny_ * kk); };
  return {{{fx(i), -1.0},
           {fx(i + 1), +1.0},
           {fy(j), -1.0},
           {fy(j + 1), +1.0},
           {fz(k), -1.0},
           {fz(k + 1), +1.0}}};
}

} // namespace porofss
