#include "shellgsm/gsm.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>

#include "shellgsm/error.hpp"

namespace shellgsm {

void AntennaGSM::check() const {
  const int n = num_modes();
  auto expect = [](const MatrixC& m, Eigen::Index rows, Eigen::Index cols, const char* name) {
    if (m.rows() != rows || m.cols() != cols) {
      std::ostringstream msg;
      msg << "GSM block " << name << " is " << m.rows() << "x" << m.cols() << ", expected " << rows << "x" << cols;
      throw DimensionError(msg.str());
    }
  };
  if (num_ports < 1) throw DimensionError("GSM needs at least one port");
  if (lmax < 1) throw DimensionError("GSM lmax must be >= 1");
  expect(gamma, num_ports, num_ports, "gamma");
  expect(r, num_ports, n, "r");
  expect(t, n, num_ports, "t");
  expect(s, n, n, "s");
}

namespace {

AntennaGSM synthetic(double f, int lmax, int ports, const HomogeneousRegion& bubble, double gamma_diag) {
  if (lmax < 1) throw DomainError("synthetic antenna: lmax must be >= 1");
  if (ports < 1) throw DomainError("synthetic antenna: needs at least one port");
  const int n = mode_count(lmax);
  AntennaGSM a;
  a.frequency_hz = f;
  a.num_ports = ports;
  a.lmax = lmax;
  a.bubble = bubble;
  a.gamma = MatrixC::Identity(ports, ports) * gamma_diag;
  a.r = MatrixC::Zero(ports, n);
  a.t = MatrixC::Zero(n, ports);
  a.s = MatrixC::Identity(n, n);
  return a;
}

}  // namespace

AntennaGSM transparent_antenna(double f, int lmax, int ports, const HomogeneousRegion& bubble) {
  return synthetic(f, lmax, ports, bubble, 0.0);
}

AntennaGSM null_antenna(double f, int lmax, int ports, const HomogeneousRegion& bubble) {
  return synthetic(f, lmax, ports, bubble, 1.0);
}

// --- interchange file ------------------------------------------------------

namespace {

using json = nlohmann::json;

constexpr std::array<const char*, 4> kBlockNames{"gamma", "r", "t", "s"};

struct MatrixBuffer {
  bool present = false;
  long rows = 0;
  long cols = -1;
  std::vector<cplx> data;
};

using BlockBuffer = std::array<MatrixBuffer, 4>;

// Streaming reader: GSM files reach ~100 MB at lmax 25, so the document is
// never materialized as a DOM.
class GsmReader {
public:
  std::optional<double> version, lmax, ports;
  std::optional<std::string> ordering;
  std::array<double, 2> eps{1.0, 0.0}, mu{1.0, 0.0};
  std::vector<double> freqs;
  std::vector<BlockBuffer> blocks;

  bool null() { return fail("unexpected null"); }
  bool boolean(bool) { return fail("unexpected boolean"); }
  bool number_integer(json::number_integer_t v) { return number(static_cast<double>(v)); }
  bool number_unsigned(json::number_unsigned_t v) { return number(static_cast<double>(v)); }
  bool number_float(json::number_float_t v, const json::string_t&) { return number(v); }
  bool binary(json::binary_t&) { return fail("unexpected binary value"); }

  bool string(json::string_t& v) {
    begin_value();
    if (frames_.size() == 1 && frames_[0].key == "mode_ordering") {
      ordering = v;
      return true;
    }
    if (frames_.size() >= 1 && !known_root()) return true;
    return fail("unexpected string");
  }

  bool start_object(std::size_t) {
    begin_value();
    if (frames_.size() == 2 && frames_[0].key == "blocks") {
      const auto b = static_cast<std::size_t>(frames_[1].index);
      if (blocks.size() <= b) blocks.resize(b + 1);
    } else if (!frames_.empty() && known_root()) {
      return fail("unexpected object");
    }
    frames_.push_back({false, {}, -1});
    return true;
  }

  bool key(json::string_t& k) {
    frames_.back().key = k;
    if (frames_.size() == 3 && frames_[0].key == "blocks" && block_slot(k) < 0)
      return fail("unknown block key '" + k + "'");
    return true;
  }

  bool end_object() {
    frames_.pop_back();
    return true;
  }

  bool start_array(std::size_t) {
    begin_value();
    if (frames_.size() == 3 && frames_[0].key == "blocks") {
      auto& m = current_matrix();
      if (m.present) return fail("duplicate block");
      m.present = true;
    }
    frames_.push_back({true, {}, -1});
    return true;
  }

  bool end_array() {
    const long count = frames_.back().index + 1;
    frames_.pop_back();
    if (frames_.size() == 5 && frames_[0].key == "blocks" && count != 2)
      return fail("complex entry must be a [re, im] pair");
    if (frames_.size() == 4 && frames_[0].key == "blocks") {
      auto& m = current_matrix();
      if (m.cols < 0) m.cols = count;
      if (count != m.cols) return fail("ragged matrix row");
      ++m.rows;
    }
    if (frames_.size() == 1 && (frames_[0].key == "bubble_eps" || frames_[0].key == "bubble_mu") && count != 2)
      return fail("medium must be a [re, im] pair");
    return true;
  }

  bool parse_error(std::size_t position, const std::string&, const json::exception& ex) {
    std::ostringstream msg;
    msg << "malformed GSM file at byte " << position;
    if (!frames_.empty()) msg << " while reading " << path();
    msg << ": " << ex.what();
    throw ParseError(msg.str());
  }

private:
  struct Frame {
    bool array;
    std::string key;
    long index;
  };
  std::vector<Frame> frames_;
  double pending_re_ = 0.0;

  bool known_root() const {
    static const std::array<const char*, 8> names{"format_version", "lmax",     "num_ports",      "mode_ordering",
                                                  "bubble_eps",     "bubble_mu", "frequencies_hz", "blocks"};
    for (const char* n : names)
      if (frames_[0].key == n) return true;
    return false;
  }

  static int block_slot(const std::string& k) {
    for (int i = 0; i < 4; ++i)
      if (k == kBlockNames[i]) return i;
    return -1;
  }

  MatrixBuffer& current_matrix() {
    return blocks[static_cast<std::size_t>(frames_[1].index)][block_slot(frames_[2].key)];
  }

  void begin_value() {
    if (!frames_.empty() && frames_.back().array) ++frames_.back().index;
  }

  std::string path() const {
    std::string out;
    for (const auto& f : frames_) {
      if (f.array) {
        if (f.index >= 0) out += "[" + std::to_string(f.index) + "]";
      } else if (!f.key.empty()) {
        if (!out.empty()) out += '.';
        out += f.key;
      }
    }
    return out;
  }

  bool fail(const std::string& what) {
    throw ParseError("GSM file: " + what + (frames_.empty() ? "" : " at " + path()));
  }

  bool number(double v) {
    begin_value();
    const auto d = frames_.size();
    if (d == 0) return fail("top level must be an object");
    const std::string& root = frames_[0].key;
    if (!known_root()) return true;
    if (d == 1) {
      if (root == "format_version") version = v;
      else if (root == "lmax") lmax = v;
      else if (root == "num_ports") ports = v;
      else return fail("unexpected number");
      return true;
    }
    if (d == 2 && (root == "bubble_eps" || root == "bubble_mu")) {
      const long i = frames_[1].index;
      if (i > 1) return fail("medium must be a [re, im] pair");
      (root == "bubble_eps" ? eps : mu)[static_cast<std::size_t>(i)] = v;
      return true;
    }
    if (d == 2 && root == "frequencies_hz") {
      freqs.push_back(v);
      return true;
    }
    if (d == 6 && root == "blocks") {
      const long comp = frames_[5].index;
      if (comp == 0) pending_re_ = v;
      else if (comp == 1) current_matrix().data.emplace_back(pending_re_, v);
      else return fail("complex entry must be a [re, im] pair");
      return true;
    }
    return fail("unexpected number");
  }
};

int as_count(const std::optional<double>& v, const char* name) {
  if (!v) throw ParseError(std::string("GSM file: missing '") + name + "'");
  if (*v != std::floor(*v) || *v < 1.0 || *v > 1e6)
    throw ParseError(std::string("GSM file: '") + name + "' must be a positive integer");
  return static_cast<int>(*v);
}

MatrixC to_matrix(const MatrixBuffer& b, long rows, long cols, const std::string& where) {
  if (b.rows != rows || b.cols != cols) {
    std::ostringstream msg;
    msg << "GSM file: " << where << " is " << b.rows << "x" << std::max(b.cols, 0L) << ", expected " << rows << "x"
        << cols;
    throw DimensionError(msg.str());
  }
  MatrixC m(rows, cols);
  for (long i = 0; i < rows; ++i)
    for (long j = 0; j < cols; ++j) m(i, j) = b.data[static_cast<std::size_t>(i * cols + j)];
  return m;
}

void append_number(std::string& out, double v) {
  if (!std::isfinite(v)) throw DomainError("save_gsm: non-finite matrix entry");
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  out.append(buf, res.ptr);
}

void append_pair(std::string& out, cplx z) {
  out += '[';
  append_number(out, z.real());
  out += ", ";
  append_number(out, z.imag());
  out += ']';
}

void append_matrix(std::string& out, const MatrixC& m) {
  out += "[";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out += i == 0 ? "\n      [" : ",\n      [";
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ", ";
      append_pair(out, m(i, j));
    }
    out += ']';
  }
  out += "\n    ]";
}

}  // namespace

std::vector<AntennaGSM> load_gsm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open GSM file '" + path + "'");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  GsmReader reader;
  json::sax_parse(text, &reader);

  if (!reader.version) throw ParseError("GSM file: missing 'format_version'");
  if (*reader.version != 1.0) throw ParseError("GSM file: unsupported format_version " + std::to_string(*reader.version));
  const int lmax = as_count(reader.lmax, "lmax");
  const int ports = as_count(reader.ports, "num_ports");
  if (!reader.ordering) throw ParseError("GSM file: missing 'mode_ordering'");
  if (*reader.ordering != "canonical-v1")
    throw ParseError("GSM file: unknown mode_ordering '" + *reader.ordering + "'");
  if (reader.freqs.empty()) throw ParseError("GSM file: missing 'frequencies_hz'");
  if (reader.blocks.size() > reader.freqs.size())
    throw DimensionError("GSM file: more blocks than frequencies");

  const long n = mode_count(lmax);
  const HomogeneousRegion bubble{{reader.eps[0], reader.eps[1]}, {reader.mu[0], reader.mu[1]}};
  std::vector<AntennaGSM> out;
  out.reserve(reader.freqs.size());
  for (std::size_t b = 0; b < reader.freqs.size(); ++b) {
    const std::string where = "blocks[" + std::to_string(b) + "]";
    if (b >= reader.blocks.size()) throw ParseError("GSM file: missing block " + where);
    const auto& buf = reader.blocks[b];
    for (int k = 0; k < 4; ++k)
      if (!buf[k].present) throw ParseError("GSM file: missing block " + where + "." + kBlockNames[k]);
    AntennaGSM g;
    g.frequency_hz = reader.freqs[b];
    g.num_ports = ports;
    g.lmax = lmax;
    g.bubble = bubble;
    g.gamma = to_matrix(buf[0], ports, ports, where + ".gamma");
    g.r = to_matrix(buf[1], ports, n, where + ".r");
    g.t = to_matrix(buf[2], n, ports, where + ".t");
    g.s = to_matrix(buf[3], n, n, where + ".s");
    out.push_back(std::move(g));
  }
  return out;
}

void save_gsm(const std::vector<AntennaGSM>& blocks, const std::string& path) {
  if (blocks.empty()) throw DomainError("save_gsm: nothing to write");
  const auto& first = blocks.front();
  for (const auto& b : blocks) {
    b.check();
    if (b.lmax != first.lmax || b.num_ports != first.num_ports)
      throw DimensionError("save_gsm: all blocks must share lmax and num_ports");
    if (b.bubble.eps != first.bubble.eps || b.bubble.mu != first.bubble.mu)
      throw DomainError("save_gsm: all blocks must share the bubble medium");
  }
  std::string out;
  out += "{\n  \"format_version\": 1,\n  \"lmax\": " + std::to_string(first.lmax) +
         ",\n  \"num_ports\": " + std::to_string(first.num_ports) +
         ",\n  \"mode_ordering\": \"canonical-v1\",\n  \"bubble_eps\": ";
  append_pair(out, first.bubble.eps);
  out += ",\n  \"bubble_mu\": ";
  append_pair(out, first.bubble.mu);
  out += ",\n  \"frequencies_hz\": [";
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (i) out += ", ";
    append_number(out, blocks[i].frequency_hz);
  }
  out += "],\n  \"blocks\": [";
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    out += i == 0 ? "\n  {" : ",\n  {";
    const MatrixC* mats[4] = {&blocks[i].gamma, &blocks[i].r, &blocks[i].t, &blocks[i].s};
    for (int k = 0; k < 4; ++k) {
      out += k == 0 ? "\n    \"" : ",\n    \"";
      out += kBlockNames[k];
      out += "\": ";
      append_matrix(out, *mats[k]);
    }
    out += "\n  }";
  }
  out += "\n  ]\n}\n";

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write GSM file '" + path + "'");
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError("write failed for GSM file '" + path + "'");
}

// --- composition -----------------------------------------------------------

namespace {

Eigen::Map<const VectorC> as_vector(const std::vector<cplx>& v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}

bool same_medium(cplx a, cplx b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); }

}  // namespace

EffectiveGSM compose(const AntennaGSM& antenna, const SSOSet& sso, unsigned which) {
  antenna.check();
  if (antenna.lmax != sso.lmax) {
    std::ostringstream msg;
    msg << "compose: antenna lmax " << antenna.lmax << " differs from shell lmax " << sso.lmax;
    throw DimensionError(msg.str());
  }
  if (sso.size() != antenna.num_modes() || static_cast<int>(sso.phi.size()) != sso.size() ||
      static_cast<int>(sso.rho.size()) != sso.size() || static_cast<int>(sso.psi.size()) != sso.size())
    throw DimensionError("compose: operator entries do not match the mode count");
  if (std::abs(antenna.frequency_hz - sso.frequency_hz) > 1.0) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "compose: antenna frequency " << antenna.frequency_hz << " Hz differs from shell frequency "
        << sso.frequency_hz << " Hz";
    throw DomainError(msg.str());
  }
  if (!same_medium(antenna.bubble.eps, sso.bubble.eps) || !same_medium(antenna.bubble.mu, sso.bubble.mu))
    throw DomainError("compose: antenna was characterized in a different bubble medium than the shell's");

  const auto t = as_vector(sso.t);
  const auto phi = as_vector(sso.phi);
  const auto rho = as_vector(sso.rho);
  const auto psi = as_vector(sso.psi);

  // M = 1 - (S - 1) rho / 2, with rho applied as a column scaling.
  MatrixC s_minus_1 = antenna.s;
  s_minus_1.diagonal().array() -= 1.0;
  EffectiveGSM out;
  out.frequency_hz = antenna.frequency_hz;
  out.num_ports = antenna.num_ports;
  out.lmax = antenna.lmax;

  // S = 1 (transparent or null antenna): M = 1 and no bounce terms survive.
  if ((s_minus_1.array() == cplx(0.0)).all()) {
    if (which & compose_gamma) out.gamma = antenna.gamma + 0.5 * (antenna.r * rho.asDiagonal()) * antenna.t;
    if (which & compose_t) out.t = psi.asDiagonal() * antenna.t;
    if (which & compose_r) out.r = antenna.r * phi.asDiagonal();
    if (which & compose_s) {
      out.s = MatrixC::Zero(antenna.s.rows(), antenna.s.cols());
      out.s.diagonal() = (1.0 + 2.0 * t.array()).matrix();
    }
    return out;
  }

  // rho reaches 1e30 and beyond at high degree (evanescent bubble modes), so
  // factor M D^-1 with D = diag(max(1, |rho|)) instead of M itself:
  // M^-1 = D^-1 (M D^-1)^-1, and rho D^-1 = w stays bounded by 1.
  const Eigen::ArrayXd d = rho.array().abs().max(1.0);
  const VectorC w = (rho.array() / d).matrix();
  MatrixC m = -0.5 * (s_minus_1 * w.asDiagonal());
  m.diagonal().array() += (1.0 / d).cast<cplx>();
  const Eigen::PartialPivLU<MatrixC> lu(m);
  const double rcond = lu.rcond();
  if (!(rcond >= 1e-12)) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "compose: multiple-scattering matrix is singular or ill-conditioned (rcond " << rcond << ") at "
        << antenna.frequency_hz << " Hz";
    throw NumericError(msg.str());
  }
  const VectorC psi_d = (psi.array() / d).matrix();

  if (which & (compose_gamma | compose_t)) {
    const MatrixC y = lu.solve(antenna.t);
    if (which & compose_gamma) out.gamma = antenna.gamma + 0.5 * (antenna.r * w.asDiagonal()) * y;
    if (which & compose_t) out.t = psi_d.asDiagonal() * y;
  }
  if (which & compose_r) {
    // R rho M^-1 = R w (M D^-1)^-1 through the transposed factorization: P right-hand sides.
    const MatrixC rw_t = (antenna.r * w.asDiagonal()).transpose();
    const MatrixC y_t = lu.transpose().solve(rw_t);
    const MatrixC y = y_t.transpose();
    out.r = antenna.r * phi.asDiagonal() + 0.5 * y * (s_minus_1 * phi.asDiagonal());
  }
  if (which & compose_s) {
    const MatrixC x = lu.solve(s_minus_1 * phi.asDiagonal());
    out.s = psi_d.asDiagonal() * x;
    out.s.diagonal() += (1.0 + 2.0 * t.array()).matrix();
  }
  return out;
}

SystemResponse respond(const EffectiveGSM& eff, const VectorC& v, const VectorC& a_f) {
  const int n = mode_count(eff.lmax);
  if (v.size() != eff.num_ports) throw DimensionError("respond: port vector has the wrong length");
  if (a_f.size() != n) throw DimensionError("respond: incident mode vector has the wrong length");
  if (eff.gamma.rows() != eff.num_ports || eff.r.rows() != eff.num_ports || eff.t.rows() != n || eff.s.rows() != n)
    throw DimensionError("respond: effective GSM is missing blocks");
  SystemResponse out;
  out.w = eff.gamma * v + 0.5 * (eff.r * a_f);
  out.f = eff.t * v + 0.5 * (eff.s * a_f - a_f);
  return out;
}

}  // namespace shellgsm
