#pragma once

#include <porofss/tensor.hpp>

#include <array>
#include <optional>

namespace porofss {

/// Flow condition on a boundary face: fixed pressure datum or no normal flux.
enum class FlowBc { Pressure, NoFlux };

/// Mechanics condition on a boundary face: all displacement components pinned,
/// only the normal component pinned (roller), or a prescribed surface traction.
enum class MechBc { Fixed, Roller, Traction };

/// Boundary data attached to one face (or to a whole boundary plane).
struct FaceBoundary {
  FlowBc flow = FlowBc::NoFlux;
  double pressure = 0.0;          ///< datum for FlowBc::Pressure
  MechBc mech = MechBc::Traction;
  Vec3 traction = Vec3::Zero();   ///< surface force density for MechBc::Traction
};

/// Per-plane boundary assignment in the order -x, +x, -y, +y, -z, +z.
/// Every plane must be tagged; Grid construction rejects gaps so that no
/// boundary face is left with an unspecified condition.
struct BoundarySpec {
  std::array<std::optional<FaceBoundary>, 6> plane;

  static BoundarySpec uniform(const FaceBoundary& fb) {
    BoundarySpec s;
    s.plane.fill(fb);
    return s;
  }
};

/**
 * Uniform structured hexahedral grid on [0, nx*hx] x [0, ny*hy] x [0, nz*hz].
 *
 * Immutable after construction. Index conventions:
 *  - cells:  c = i + nx*(j + ny*k), x fastest;
 *  - faces:  all x-normal faces first, then y-normal, then z-normal, each
 *            block lexicographic with x fastest; the x-face with index i in
 *            [0, nx] sits between cells (i-1) and i of its row;
 *  - nodes:  n = i + (nx+1)*(j + (ny+1)*k).
 * Face normals always point along +axis; cell_to_faces reports the
 * orientation sign that turns a face value into an outward flux.
 */
class Grid {
public:
  Grid(int nx, int ny, int nz, double hx, double hy, double hz,
       const BoundarySpec& bc);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int nz() const { return nz_; }
  double hx() const { return h_[0]; }
  double hy() const { return h_[1]; }
  double hz() const { return h_[2]; }
  double spacing(int axis) const { return h_[axis]; }

  int num_cells() const { return nx_ * ny_ * nz_; }
  int num_faces() const { return nfx_ + nfy_ + nfz_; }
  int num_nodes() const { return (nx_ + 1) * (ny_ + 1) * (nz_ + 1); }

  double cell_volume() const { return h_[0] * h_[1] * h_[2]; }
  /// Area of any face orthogonal to the given axis.
  double face_area(int axis) const;

  int cell_index(int i, int j, int k) const;
  std::array<int, 3> cell_coords(int c) const;
  Vec3 cell_center(int c) const;

  int node_index(int i, int j, int k) const;
  Vec3 node_coord(int n) const;
  /// Nodes of a cell, local order x fastest: (i,j,k), (i+1,j,k), (i,j+1,k), ...
  std::array<int, 8> cell_nodes(int c) const;

  int face_axis(int f) const;
  Vec3 face_centroid(int f) const;
  /// The four corner nodes of a face.
  std::array<int, 4> face_nodes(int f) const;
  bool face_is_boundary(int f) const;
  /// Boundary plane id (0..5 in -x,+x,-y,+y,-z,+z order), or -1 if interior.
  int face_plane(int f) const;
  /// Boundary data for a boundary face; throws for interior faces.
  const FaceBoundary& face_boundary(int f) const;

  /// Cells adjacent to a face; the face normal points from minus to plus.
  /// A boundary face reports -1 on its exterior side.
  struct FaceCells {
    int minus = -1;
    int plus = -1;
  };
  FaceCells face_cells(int f) const;

  /// The six faces of a cell in -x,+x,-y,+y,-z,+z order, each paired with
  /// the sign that converts the face value (oriented along +axis) into an
  /// outward flux for this cell: (-1,+1,-1,+1,-1,+1).
  struct CellFace {
    int face = -1;
    double sign = 0.0;
  };
  std::array<CellFace, 6> cell_to_faces(int c) const;

  const FaceBoundary& plane_boundary(int plane) const { return bc_[plane]; }

private:
  void check_cell(int c) const;
  void check_face(int f) const;

  int nx_, ny_, nz_;
  std::array<double, 3> h_;
  int nfx_, nfy_, nfz_;
  std::array<FaceBoundary, 6> bc_;
};

} // namespace porofss
