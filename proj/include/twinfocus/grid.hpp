#ifndef TWINFOCUS_GRID_HPP
#define TWINFOCUS_GRID_HPP

#include <array>
#include <cmath>
#include <stdexcept>

namespace twinfocus {

// Input-mode raster (SLM macropixels). Modes are indexed row-major,
// positions are macropixel centers on a centered grid. The standard layout
// is square (rows == cols == n_side); a single-row variant exists for
// chain-style fixtures with a non-square mode count.
class ModeGrid {
 public:
  static ModeGrid square(int n_side, double pitch) { return ModeGrid(n_side, n_side, pitch); }
  static ModeGrid line(int n_modes, double pitch) { return ModeGrid(1, n_modes, pitch); }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int n_side() const {
    if (rows_ != cols_) throw std::logic_error("ModeGrid: not square");
    return rows_;
  }
  double pitch() const { return pitch_; }
  int modes() const { return rows_ * cols_; }

  int index(int i, int j) const { return i * cols_ + j; }
  std::array<int, 2> coords(int m) const { return {m / cols_, m % cols_}; }

  // Center of macropixel m, in meters, relative to the grid center.
  // x follows the column index, y the row index.
  std::array<double, 2> position(int m) const {
    const auto [i, j] = coords(m);
    const double cy = 0.5 * (rows_ - 1);
    const double cx = 0.5 * (cols_ - 1);
    return {pitch_ * (j - cx), pitch_ * (i - cy)};
  }

  bool operator==(const ModeGrid& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ && pitch_ == other.pitch_;
  }

 private:
  ModeGrid(int rows, int cols, double pitch) : rows_(rows), cols_(cols), pitch_(pitch) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("ModeGrid: empty grid");
    if (!(pitch > 0.0)) throw std::invalid_argument("ModeGrid: pitch must be positive");
  }

  int rows_;
  int cols_;
  double pitch_;
};

// Output pixel raster of the camera plane, row-major flattening k = y*w + x.
struct OutShape {
  int h = 1;
  int w = 1;

  int pixels() const { return h * w; }
  int index(int y, int x) const { return y * w + x; }
  std::array<int, 2> coords(int k) const { return {k / w, k % w}; }
  bool contains(int y, int x) const { return y >= 0 && y < h && x >= 0 && x < w; }

  bool operator==(const OutShape& other) const { return h == other.h && w == other.w; }
};

}  // namespace twinfocus

#endif  // TWINFOCUS_GRID_HPP
