#include "fraclap/field.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <sstream>

#include "fft.hpp"
#include "fraclap/cutoff.hpp"
#include "fraclap/error.hpp"

namespace fraclap {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_dimension: return "invalid-dimension";
    case ErrorCode::invalid_grid: return "invalid-grid";
    case ErrorCode::invalid_parameter: return "invalid-parameter";
    case ErrorCode::unknown_descriptor: return "unknown-descriptor";
    case ErrorCode::non_finite: return "non-finite";
    case ErrorCode::grid_mismatch: return "grid-mismatch";
    case ErrorCode::grid_too_coarse: return "grid-too-coarse";
    case ErrorCode::degenerate_fit: return "degenerate-fit";
    case ErrorCode::missing_parameter: return "missing-parameter";
    case ErrorCode::io_error: return "io-error";
    case ErrorCode::empty_input: return "empty-input";
  }
  return "unknown";
}

// ---------------------------------------------------------------- GridSpec

GridSpec::GridSpec(int dim, std::size_t n, double half_width)
    : dim_(dim), n_(n), half_width_(half_width), wavenumbers_(n) {
  for (std::size_t j = 0; j < n_; ++j)
    wavenumbers_[j] = std::numbers::pi * static_cast<double>(mode_index(j)) / half_width_;
}

double GridSpec::cell_volume() const noexcept {
  const double h = spacing();
  return dim_ == 1 ? h : h * h;
}

double GridSpec::k_max() const noexcept {
  return std::numbers::pi * static_cast<double>(n_ / 2) / half_width_;
}

double GridSpec::wavenumber_norm(std::size_t index) const noexcept {
  if (dim_ == 1) return std::abs(wavenumbers_[index]);
  const double k0 = wavenumbers_[index / n_];
  const double k1 = wavenumbers_[index % n_];
  return std::sqrt(k0 * k0 + k1 * k1);
}

double GridSpec::radius_squared(std::size_t index) const noexcept {
  if (dim_ == 1) {
    const double x = coordinate(index);
    return x * x;
  }
  const double x0 = coordinate(index / n_);
  const double x1 = coordinate(index % n_);
  return x0 * x0 + x1 * x1;
}

GridSpec make_grid(int dim, std::size_t n, double half_width) {
  require(dim == 1 || dim == 2, ErrorCode::invalid_dimension,
          "grid dimension must be 1 or 2, got " + std::to_string(dim));
  require(n >= 16 && std::has_single_bit(n), ErrorCode::invalid_grid,
          "points per dimension must be a power of two >= 16, got " + std::to_string(n));
  require(std::isfinite(half_width) && half_width > 0.0, ErrorCode::invalid_grid,
          "box half-width must be positive");
  return GridSpec(dim, n, half_width);
}

// ------------------------------------------------------------------- Field

Field::Field(GridSpec grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  require(values_.size() == grid_.size(), ErrorCode::grid_mismatch,
          "field has " + std::to_string(values_.size()) + " values, grid needs " +
              std::to_string(grid_.size()));
}

Field::Field(GridSpec grid) : grid_(std::move(grid)), values_(grid_.size(), 0.0) {}

bool Field::is_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double Field::boundary_max() const noexcept {
  const std::size_t n = grid_.points_per_dim();
  if (grid_.dim() == 1) return std::abs(values_[0]);
  double m = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    m = std::max(m, std::abs(values_[j]));      // x0 = -L
    m = std::max(m, std::abs(values_[j * n]));  // x1 = -L
  }
  return m;
}

Spectrum::Spectrum(GridSpec grid, std::vector<std::complex<double>> coefficients)
    : grid_(std::move(grid)), coefficients_(std::move(coefficients)) {
  require(coefficients_.size() == grid_.size(), ErrorCode::grid_mismatch,
          "spectrum size does not match grid");
}

Spectrum to_spectrum(const Field& field) {
  require(field.is_finite(), ErrorCode::non_finite, "cannot transform a non-finite field");
  const auto& grid = field.grid();
  std::vector<std::complex<double>> data(field.values().begin(), field.values().end());
  detail::fft_forward(data, grid.dim(), grid.points_per_dim());
  const double scale = 1.0 / static_cast<double>(grid.size());
  for (auto& c : data) c *= scale;
  return Spectrum(grid, std::move(data));
}

Field from_spectrum(const Spectrum& spectrum) {
  const auto& grid = spectrum.grid();
  std::vector<std::complex<double>> data(spectrum.coefficients().begin(),
                                         spectrum.coefficients().end());
  detail::fft_backward(data, grid.dim(), grid.points_per_dim());
  std::vector<double> values(data.size());
  std::transform(data.begin(), data.end(), values.begin(),
                 [](const std::complex<double>& c) { return c.real(); });
  return Field(grid, std::move(values));
}

Field apply_radial_multiplier(const Field& field, const std::function<double(double)>& multiplier) {
  Spectrum s = to_spectrum(field);
  auto& c = s.mutable_coefficients();
  const auto& grid = field.grid();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= multiplier(grid.wavenumber_norm(i));
  return from_spectrum(s);
}

// ------------------------------------------------------------- descriptors

namespace {

std::vector<double> parse_numbers(std::string_view text) {
  std::vector<double> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    std::string token(text.substr(0, comma));
    token.erase(0, token.find_first_not_of(" \t"));
    token.erase(token.find_last_not_of(" \t") + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      fail(ErrorCode::invalid_parameter, "cannot parse number '" + token + "'");
    }
    require(used == token.size(), ErrorCode::invalid_parameter,
            "cannot parse number '" + token + "'");
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

void validate(const Descriptor& d) {
  std::visit(
      [](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Gaussian>) {
          require(std::isfinite(f.amplitude) && f.width > 0.0, ErrorCode::invalid_parameter,
                  "gaussian needs finite amplitude and width > 0");
        } else if constexpr (std::is_same_v<T, AlgebraicDecay>) {
          require(f.epsilon >= 0.0 && f.gamma > 0.0, ErrorCode::invalid_parameter,
                  "algebraic_decay needs epsilon >= 0 and gamma > 0");
        } else if constexpr (std::is_same_v<T, PlaneWave>) {
          require(f.axis == 0 || f.axis == 1, ErrorCode::invalid_parameter,
                  "plane_wave axis must be 0 or 1");
        } else if constexpr (std::is_same_v<T, Bump>) {
          require(f.radius > 0.0, ErrorCode::invalid_parameter, "bump radius must be positive");
        } else {
          require(std::isfinite(f.value), ErrorCode::invalid_parameter,
                  "constant must be finite");
        }
      },
      d);
}

}  // namespace

Descriptor parse_descriptor(std::string_view text) {
  const auto colon = text.find(':');
  const std::string name(text.substr(0, colon));
  const std::vector<double> args =
      colon == std::string_view::npos ? std::vector<double>{} : parse_numbers(text.substr(colon + 1));
  auto arg = [&](std::size_t i, double fallback) { return i < args.size() ? args[i] : fallback; };

  Descriptor d;
  if (name == "gaussian") {
    d = Gaussian{arg(0, 1.0), arg(1, 1.0)};
  } else if (name == "algdecay" || name == "algebraic_decay") {
    d = AlgebraicDecay{arg(0, 1.0), arg(1, 1.0)};
  } else if (name == "plane" || name == "plane_wave") {
    d = PlaneWave{static_cast<int>(arg(0, 1.0)), static_cast<int>(arg(1, 0.0))};
  } else if (name == "bump") {
    d = Bump{arg(0, 1.0)};
  } else if (name == "const" || name == "constant") {
    d = Constant{arg(0, 1.0)};
  } else {
    fail(ErrorCode::unknown_descriptor, "unknown function family '" + name + "'");
  }
  validate(d);
  return d;
}

std::string describe(const Descriptor& descriptor) {
  std::ostringstream os;
  os << std::setprecision(17);
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Gaussian>) os << "gaussian:" << f.amplitude << ',' << f.width;
        else if constexpr (std::is_same_v<T, AlgebraicDecay>) os << "algdecay:" << f.epsilon << ',' << f.gamma;
        else if constexpr (std::is_same_v<T, PlaneWave>) os << "plane:" << f.mode << ',' << f.axis;
        else if constexpr (std::is_same_v<T, Bump>) os << "bump:" << f.radius;
        else os << "const:" << f.value;
      },
      descriptor);
  return os.str();
}

double evaluate(const Descriptor& descriptor, const GridSpec& grid, std::span<const double> x) {
  double r2 = 0.0;
  for (double xi : x) r2 += xi * xi;
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Gaussian>) {
          return f.amplitude * std::exp(-r2 / (2.0 * f.width * f.width));
        } else if constexpr (std::is_same_v<T, AlgebraicDecay>) {
          return f.epsilon * std::pow(1.0 + r2, -0.5 * f.gamma);
        } else if constexpr (std::is_same_v<T, PlaneWave>) {
          const double xa = x[static_cast<std::size_t>(f.axis)];
          return std::cos(std::numbers::pi * f.mode * xa / grid.half_width());
        } else if constexpr (std::is_same_v<T, Bump>) {
          return cutoff::profile(std::sqrt(r2) / f.radius);
        } else {
          return f.value;
        }
      },
      descriptor);
}

Field sample(const Descriptor& descriptor, const GridSpec& grid) {
  validate(descriptor);
  const std::size_t n = grid.points_per_dim();
  std::vector<double> values(grid.size());
  if (const auto* pw = std::get_if<PlaneWave>(&descriptor)) {
    require(pw->axis < grid.dim(), ErrorCode::invalid_parameter, "plane_wave axis exceeds grid dimension");
    // pi k x_j / L = -pi k + 2 pi k j / n; reducing k j mod n keeps the phase exact.
    const auto nn = static_cast<std::int64_t>(n);
    const double sign = pw->mode % 2 == 0 ? 1.0 : -1.0;
    for (std::size_t idx = 0; idx < values.size(); ++idx) {
      const std::size_t j = grid.dim() == 1 ? idx : (pw->axis == 0 ? idx / n : idx % n);
      const std::int64_t r = ((pw->mode * static_cast<std::int64_t>(j)) % nn + nn) % nn;
      values[idx] = sign * std::cos(2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(n));
    }
    return Field(grid, std::move(values));
  }

  if (grid.dim() == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::array<double, 1> x{grid.coordinate(i)};
      values[i] = evaluate(descriptor, grid, x);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const std::array<double, 2> x{grid.coordinate(i), grid.coordinate(j)};
        values[i * n + j] = evaluate(descriptor, grid, x);
      }
  }
  Field field(grid, std::move(values));

  const bool decaying = !std::holds_alternative<PlaneWave>(descriptor) &&
                        !std::holds_alternative<Constant>(descriptor);
  if (decaying) {
    const double edge = field.boundary_max();
    if (edge > 1e-12) {
      std::ostringstream os;
      os << "truncation: " << describe(descriptor) << " reaches " << std::setprecision(3) << edge
         << " at the box boundary (L = " << grid.half_width() << ")";
      field.set_warning(os.str());
    }
  }
  return field;
}

// ------------------------------------------------------------------- norms

Norms norms(const Field& field, double q) {
  require(field.is_finite(), ErrorCode::non_finite, "norms of a non-finite field");
  require(q >= 1.0, ErrorCode::invalid_parameter, "Lq norm needs q >= 1");
  const double w = field.grid().cell_volume();
  Norms out;
  out.q = q;
  double s1 = 0.0, s2 = 0.0, sq = 0.0;
  for (double v : field.values()) {
    const double a = std::abs(v);
    out.sup = std::max(out.sup, a);
    s1 += a;
    s2 += a * a;
    sq += std::pow(a, q);
  }
  out.l1 = w * s1;
  out.l2 = std::sqrt(w * s2);
  out.lq = std::pow(w * sq, 1.0 / q);
  return out;
}

double lq_norm(const Field& field, double q) { return norms(field, q).lq; }

double integrate(const Field& field) {
  double s = 0.0;
  for (double v : field.values()) s += v;
  return s * field.grid().cell_volume();
}

double inner_product(const Field& a, const Field& b) {
  require(a.grid() == b.grid(), ErrorCode::grid_mismatch, "inner product of fields on different grids");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s * a.grid().cell_volume();
}

// ---------------------------------------------------------------------- io

void write_csv(const Field& field, std::ostream& out) {
  const auto& grid = field.grid();
  const std::size_t n = grid.points_per_dim();
  out << std::setprecision(17);
  if (grid.dim() == 1) {
    out << "x,value\n";
    for (std::size_t i = 0; i < n; ++i) out << grid.coordinate(i) << ',' << field[i] << '\n';
  } else {
    out << "x,y,value\n";
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        out << grid.coordinate(i) << ',' << grid.coordinate(j) << ',' << field[i * n + j] << '\n';
  }
}

void write_csv(const Field& field, const std::filesystem::path& path) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCode::io_error, "cannot open " + path.string());
  write_csv(field, out);
}

Field read_csv(std::istream& in) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::io_error, "empty CSV");
  const int columns = static_cast<int>(std::count(line.begin(), line.end(), ',')) + 1;
  require(columns == 2 || columns == 3, ErrorCode::io_error, "CSV must have 2 or 3 columns");
  const int dim = columns - 1;

  std::vector<double> first_axis;
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto numbers = parse_numbers(line);
    require(static_cast<int>(numbers.size()) == columns, ErrorCode::io_error, "ragged CSV row: " + line);
    first_axis.push_back(numbers[0]);
    values.push_back(numbers.back());
  }
  require(!values.empty(), ErrorCode::io_error, "CSV has no rows");
  const std::size_t n =
      dim == 1 ? values.size()
               : static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(values.size()))));
  require(dim == 1 || n * n == values.size(), ErrorCode::io_error, "2D CSV row count is not a square");
  const double x0 = first_axis.front();
  const GridSpec grid = make_grid(dim, n, -x0);
  // Sanity check the coordinate column against the implied grid.
  const std::size_t stride = dim == 1 ? 1 : n;
  for (std::size_t i = 0; i < n; ++i)
    require(std::abs(first_axis[i * stride] - grid.coordinate(i)) <= 1e-9 * grid.half_width(),
            ErrorCode::io_error, "CSV coordinates are not a uniform periodic grid");
  return Field(grid, std::move(values));
}

Field read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::io_error, "cannot open " + path.string());
  return read_csv(in);
}

namespace {

void put_le(std::ostream& out, std::uint64_t bits) {
  std::array<char, 8> bytes{};
  for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((bits >> (8 * b)) & 0xFFu);
  out.write(bytes.data(), 8);
}

std::uint64_t get_le(std::istream& in) {
  std::array<unsigned char, 8> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), 8);
  require(in.gcount() == 8, ErrorCode::io_error, "truncated binary field container");
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
  return bits;
}

}  // namespace

void write_binary(const Field& field, std::ostream& out) {
  const auto& grid = field.grid();
  put_le(out, static_cast<std::uint64_t>(grid.dim()));
  put_le(out, static_cast<std::uint64_t>(grid.points_per_dim()));
  put_le(out, std::bit_cast<std::uint64_t>(grid.half_width()));
  for (double v : field.values()) put_le(out, std::bit_cast<std::uint64_t>(v));
}

void write_binary(const Field& field, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::io_error, "cannot open " + path.string());
  write_binary(field, out);
}

Field read_binary(std::istream& in) {
  const auto dim = static_cast<std::int64_t>(get_le(in));
  const auto n = static_cast<std::int64_t>(get_le(in));
  const double L = std::bit_cast<double>(get_le(in));
  require(n > 0, ErrorCode::io_error, "binary container has invalid n");
  const GridSpec grid = make_grid(static_cast<int>(dim), static_cast<std::size_t>(n), L);
  std::vector<double> values(grid.size());
  for (auto& v : values) v = std::bit_cast<double>(get_le(in));
  return Field(grid, std::move(values));
}

Field read_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::io_error, "cannot open " + path.string());
  return read_binary(in);
}

Field load_field(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? read_csv(path) : read_binary(path);
}

void save_field(const Field& field, const std::filesystem::path& path) {
  if (path.extension() == ".csv") write_csv(field, path);
  else write_binary(field, path);
}

}  // namespace fraclap
