#include "bgk/moments.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "bgk/errors.hpp"
#include "bgk/qmc.hpp"
#include "bgk/simd/kernels.hpp"

namespace bgk {

double disc_moment(int k) { return M_PI / (k + 1); }

double ball_moment(int n, const std::vector<int>& alpha) {
  double logv = n * std::log(M_PI);
  int total = 0;
  for (int a : alpha) {
    logv += std::lgamma(a + 1.0);
    total += a;
  }
  logv -= std::lgamma(n + total + 1.0);
  return std::exp(logv);
}

double egg2_moment(int two_m, int a, int b) {
  // M(a,b) = pi^2/(b+1) * B(a+1, (b+1)/m + 1), m = two_m/2
  double m = two_m / 2.0;
  double x = a + 1.0;
  double y = (b + 1.0) / m + 1.0;
  double logbeta = std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y);
  return M_PI * M_PI / (b + 1.0) * std::exp(logbeta);
}

double ellipsoid_moment(const std::vector<double>& coeffs, const std::vector<int>& alpha) {
  double v = ball_moment(static_cast<int>(coeffs.size()), alpha);
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    v *= std::pow(coeffs[i], -(alpha[i] + 1.0));
  return v;
}

namespace {

void enumerate_alphas(int n, int degree, std::vector<std::vector<int>>& out) {
  std::vector<int> a(static_cast<std::size_t>(n), 0);
  std::function<void(int, int)> rec = [&](int pos, int remaining) {
    if (pos == n - 1) {
      for (int v = 0; v <= remaining; ++v) {
        a[static_cast<std::size_t>(pos)] = v;
        out.push_back(a);
      }
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      a[static_cast<std::size_t>(pos)] = v;
      rec(pos + 1, remaining - v);
    }
  };
  rec(0, degree);
}

}  // namespace

MomentTable MomentTable::closed_form(const Domain& dom, int degree) {
  MomentTable t;
  t.n_ = dom.dim();
  t.degree_ = degree;
  t.source_ = MomentSource::ClosedFormBeta;
  t.domain_id_ = dom.id();
  std::vector<std::vector<int>> alphas;
  enumerate_alphas(t.n_, degree, alphas);
  for (const auto& a : alphas) {
    double v;
    switch (dom.kind()) {
      case DomainKind::Ball:
        v = ball_moment(t.n_, a);
        break;
      case DomainKind::Polydisc: {
        v = 1.0;
        for (int ai : a) v *= disc_moment(ai);
        break;
      }
      case DomainKind::Ellipsoid:
        v = ellipsoid_moment(dom.coeffs(), a);
        break;
      case DomainKind::Egg:
        if (t.n_ != 2)
          throw UnsupportedDomain("closed-form egg moments registered for n=2 only");
        v = egg2_moment(dom.egg_exponent(), a[0], a[1]);
        break;
      default:
        throw UnsupportedDomain("no closed-form moments for domain " + dom.id());
    }
    t.values_[a] = v;
  }
  return t;
}

MomentTable MomentTable::quadrature(const Domain& dom, int degree, std::size_t nodes,
                                    std::uint64_t seed) {
  if (!dom.bounded())
    throw QuadratureUnavailable("quadrature moments need a bounded domain");
  MomentTable t;
  const int n = dom.dim();
  t.n_ = n;
  t.degree_ = degree;
  t.source_ = MomentSource::Quadrature;
  t.nodes_ = nodes;
  t.seed_ = seed;
  t.domain_id_ = dom.id();

  RVec lo, hi;
  dom.bounding_box(lo, hi);
  double boxvol = 1.0;
  for (int r = 0; r < 2 * n; ++r) boxvol *= hi[r] - lo[r];

  // accumulators acc[alpha] of prod_i r_i^{alpha_i}, r_i = |z_i|^2,
  // laid out as rows over the leading exponents with the last exponent
  // contiguous (axpy-friendly)
  std::vector<std::vector<int>> prefixes;  // first n-1 exponents
  enumerate_alphas(std::max(n - 1, 1), n == 1 ? 0 : degree, prefixes);
  if (n == 1) {
    prefixes.clear();
    prefixes.push_back({});
  }
  struct Row {
    std::vector<int> prefix;
    int len;
  };
  std::vector<Row> rows;
  for (auto& p : prefixes) {
    int used = 0;
    for (int v : p) used += v;
    if (used <= degree) rows.push_back({p, degree - used + 1});
  }
  std::vector<std::vector<double>> acc(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    acc[r].assign(static_cast<std::size_t>(rows[r].len), 0.0);

  HaltonSequence seq(2 * n, seed);
  std::vector<double> u(static_cast<std::size_t>(2 * n));
  CPoint z(n);
  std::vector<std::vector<double>> pow_tab(static_cast<std::size_t>(n));
  for (auto& pt : pow_tab) pt.assign(static_cast<std::size_t>(degree + 1), 0.0);

  std::size_t accepted = 0;
  for (std::size_t i = 0; i < nodes; ++i) {
    seq.point(i, u.data());
    for (int k = 0; k < n; ++k) {
      double re = lo[2 * k] + (hi[2 * k] - lo[2 * k]) * u[static_cast<std::size_t>(2 * k)];
      double im =
          lo[2 * k + 1] + (hi[2 * k + 1] - lo[2 * k + 1]) * u[static_cast<std::size_t>(2 * k + 1)];
      z[k] = C(re, im);
    }
    if (!dom.member(z)) continue;
    ++accepted;
    for (int k = 0; k < n; ++k) {
      double rr = std::norm(z[k]);
      double* pt = pow_tab[static_cast<std::size_t>(k)].data();
      pt[0] = 1.0;
      for (int d = 1; d <= degree; ++d) pt[d] = pt[d - 1] * rr;
    }
    const double* last = pow_tab[static_cast<std::size_t>(n - 1)].data();
    for (std::size_t r = 0; r < rows.size(); ++r) {
      double wprefix = 1.0;
      for (int k = 0; k + 1 < n; ++k)
        wprefix *= pow_tab[static_cast<std::size_t>(k)]
                          [static_cast<std::size_t>(rows[r].prefix[static_cast<std::size_t>(k)])];
      simd::axpy(wprefix, last, acc[r].data(), static_cast<std::size_t>(rows[r].len));
    }
  }
  if (accepted == 0) throw QuadratureUnavailable("no quadrature nodes accepted");

  const double scale = boxvol / static_cast<double>(nodes);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::vector<int> alpha = rows[r].prefix;
    alpha.push_back(0);
    if (n == 1) alpha = {0};
    for (int j = 0; j < rows[r].len; ++j) {
      alpha[static_cast<std::size_t>(n - 1)] = j;
      t.values_[alpha] = acc[r][static_cast<std::size_t>(j)] * scale;
    }
  }
  return t;
}

double MomentTable::at(const std::vector<int>& alpha) const {
  auto it = values_.find(alpha);
  if (it == values_.end()) throw Error("moment not tabulated");
  return it->second;
}

bool MomentTable::has(const std::vector<int>& alpha) const {
  return values_.count(alpha) != 0;
}

void MomentTable::save(std::ostream& os) const {
  os << "# bgk moment table v1\n";
  os << "# domain " << domain_id_ << "\n";
  os << "# dim " << n_ << " degree " << degree_ << "\n";
  os << "# source " << (source_ == MomentSource::Quadrature ? "quadrature" : "beta") << " nodes "
     << nodes_ << " seed " << seed_ << "\n";
  os.precision(17);
  for (const auto& [alpha, v] : values_) {
    for (int a : alpha) os << a << " ";
    os << std::scientific << v << " "
       << (source_ == MomentSource::Quadrature ? "quadrature" : "beta") << "\n";
  }
}

MomentTable MomentTable::load(std::istream& is) {
  MomentTable t;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      std::string key;
      hs >> key;
      if (key == "domain") hs >> t.domain_id_;
      if (key == "dim") {
        hs >> t.n_;
        std::string w;
        hs >> w >> t.degree_;
      }
      if (key == "source") {
        std::string s, w;
        hs >> s;
        t.source_ = (s == "quadrature") ? MomentSource::Quadrature : MomentSource::ClosedFormBeta;
        hs >> w >> t.nodes_ >> w >> t.seed_;
      }
      continue;
    }
    std::istringstream ls(line);
    std::vector<double> nums;
    double x;
    std::string tag;
    while (ls >> x) nums.push_back(x);
    // last numeric field is the value; the trailing tag may have stopped the stream
    if (nums.size() < 2) continue;
    std::vector<int> alpha;
    for (std::size_t i = 0; i + 1 < nums.size(); ++i) alpha.push_back(static_cast<int>(nums[i]));
    t.values_[alpha] = nums.back();
    if (t.n_ == 0) t.n_ = static_cast<int>(alpha.size());
  }
  return t;
}

MomentTable MomentTable::cached_quadrature(const Domain& dom, int degree, std::size_t nodes,
                                           std::uint64_t seed, const std::string& cache_dir) {
  namespace fs = std::filesystem;
  std::ostringstream name;
  std::string id = dom.id();
  for (char& c : id)
    if (c == ':' || c == ',' || c == '(' || c == ')') c = '_';
  name << id << "_d" << degree << "_n" << nodes << "_s" << seed << ".moments";
  fs::path path = fs::path(cache_dir) / name.str();
  if (fs::exists(path)) {
    std::ifstream in(path);
    if (in) {
      MomentTable t = load(in);
      if (t.degree() >= degree && !t.entries().empty()) return t;
    }
  }
  MomentTable t = quadrature(dom, degree, nodes, seed);
  std::error_code ec;
  fs::create_directories(cache_dir, ec);
  std::ofstream out(path);
  if (out) t.save(out);
  return t;
}

}  // namespace bgk
