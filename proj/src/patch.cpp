#include "curv/patch.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace curv {

double unit_uniform(std::uint64_t bits) { return double(bits >> 11) * 0x1.0p-53; }

bool ImmersionPatch::contains(const Point4& u) const {
  for (int k = 0; k < 4; ++k)
    if (axes[k] == AxisKind::Interval && (u[k] <= lo[k] || u[k] >= hi[k])) return false;
  return true;
}

Point4 ImmersionPatch::sample(std::uint64_t seed, int k) const {
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ull + std::uint64_t(k) + 1);
  Point4 u{};
  for (int a = 0; a < 4; ++a) {
    double t = unit_uniform(rng());
    if (axes[a] == AxisKind::Interval) t = 0.1 + 0.8 * t;
    u[a] = lo[a] + (hi[a] - lo[a]) * t;
  }
  return u;
}

namespace {

JetPoint variables(const Point4& u, int order) {
  JetPoint x;
  for (int k = 0; k < 4; ++k) x[k] = Jet::variable(k, u[k], order);
  return x;
}

// Positive-definiteness of the 4x4 Gram matrix. Each d_i Phi must be
// non-negligible against the longest one, and independence is tested on the
// unit-diagonal matrix so short but orthogonal columns (polar charts near a
// pole) are accepted.
bool gram_positive(const JetVec& phi) {
  double g[4][4];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double s = 0;
      for (const Jet& c : phi) s += c.coeff(1 + i) * c.coeff(1 + j);
      g[i][j] = s;
    }
  const double top = std::max({g[0][0], g[1][1], g[2][2], g[3][3]});
  if (!(top > 0)) return false;
  double inv[4];
  for (int i = 0; i < 4; ++i) {
    if (!(g[i][i] > 1e-20 * top)) return false;
    inv[i] = 1 / std::sqrt(g[i][i]);
  }
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) g[i][j] *= inv[i] * inv[j];
  for (int j = 0; j < 4; ++j) {
    double d = g[j][j];
    for (int k = 0; k < j; ++k) d -= g[j][k] * g[j][k];
    if (d <= 1e-12) return false;
    d = std::sqrt(d);
    g[j][j] = d;
    for (int i = j + 1; i < 4; ++i) {
      double s = g[i][j];
      for (int k = 0; k < j; ++k) s -= g[i][k] * g[j][k];
      g[i][j] = s / d;
    }
  }
  return true;
}

std::string format_point(const Point4& u) {
  std::ostringstream os;
  os.precision(6);
  os << "(" << u[0] << ", " << u[1] << ", " << u[2] << ", " << u[3] << ")";
  return os.str();
}

}  // namespace

JetVec eval_jet(const ImmersionPatch& patch, const Point4& u, int order) {
  if (order < 1) throw DepthError("eval_jet needs order >= 1");
  JetVec phi = patch.chart(variables(u, order));
  if (!gram_positive(phi))
    throw ImmersionError("immersion failure: degenerate Gram matrix at u = " + format_point(u) +
                         " on " + patch.name);
  return phi;
}

ImmersionPatch preset_flat(int m) {
  if (m < 5 || m > 16) throw std::invalid_argument("flat preset: m must be in [5, 16]");
  ImmersionPatch p;
  p.name = "flat";
  p.m = m;
  p.chart = [m](const JetPoint& u) {
    JetVec x(m, Jet(0.0));
    for (int k = 0; k < 4; ++k) x[k] = u[k];
    return x;
  };
  p.normal_frame = [m](const JetPoint&) {
    std::vector<JetVec> n;
    for (int a = 4; a < m; ++a) {
      JetVec v(m, Jet(0.0));
      v[a] = 1.0;
      n.push_back(v);
    }
    return n;
  };
  p.lo = {0, 0, 0, 0};
  p.hi = {1, 1, 1, 1};
  p.axes = {AxisKind::Interval, AxisKind::Interval, AxisKind::Interval, AxisKind::Interval};
  return p;
}

ImmersionPatch preset_sphere(double r) {
  if (!(r > 0)) throw std::invalid_argument("sphere preset: radius must be positive");
  ImmersionPatch p;
  p.name = "sphere";
  p.m = 5;
  auto unit = [](const JetPoint& u) {
    Jet s1 = sin(u[0]), s2 = sin(u[1]), s3 = sin(u[2]);
    Jet a = s1 * s2;
    Jet b = a * s3;
    return JetVec{cos(u[0]), s1 * cos(u[1]), a * cos(u[2]), b * cos(u[3]), b * sin(u[3])};
  };
  p.chart = [unit, r](const JetPoint& u) {
    JetVec x = unit(u);
    for (auto& c : x) c *= r;
    return x;
  };
  p.normal_frame = [unit](const JetPoint& u) { return std::vector<JetVec>{unit(u)}; };
  const double pi = M_PI;
  p.lo = {0, 0, 0, 0};
  p.hi = {pi, pi, pi, 2 * pi};
  p.axes = {AxisKind::Interval, AxisKind::Interval, AxisKind::Interval, AxisKind::Periodic};
  p.closed = true;
  p.euler = 2;
  return p;
}

ImmersionPatch preset_clifford_torus(double a) {
  if (!(a > 0)) throw std::invalid_argument("torus preset: radius must be positive");
  ImmersionPatch p;
  p.name = "torus";
  p.m = 8;
  p.chart = [a](const JetPoint& u) {
    JetVec x(8);
    for (int k = 0; k < 4; ++k) {
      x[2 * k] = a * cos(u[k]);
      x[2 * k + 1] = a * sin(u[k]);
    }
    return x;
  };
  p.normal_frame = [](const JetPoint& u) {
    std::vector<JetVec> n;
    for (int k = 0; k < 4; ++k) {
      JetVec v(8, Jet(0.0));
      v[2 * k] = cos(u[k]);
      v[2 * k + 1] = sin(u[k]);
      n.push_back(v);
    }
    return n;
  };
  const double pi = M_PI;
  p.lo = {0, 0, 0, 0};
  p.hi = {2 * pi, 2 * pi, 2 * pi, 2 * pi};
  p.axes = {AxisKind::Periodic, AxisKind::Periodic, AxisKind::Periodic, AxisKind::Periodic};
  p.closed = true;
  p.euler = 0;
  return p;
}

ImmersionPatch preset_s2xs2(double a, double b) {
  if (!(a > 0 && b > 0)) throw std::invalid_argument("s2xs2 preset: radii must be positive");
  ImmersionPatch p;
  p.name = "s2xs2";
  p.m = 6;
  auto unit = [](const Jet& th, const Jet& ph) {
    Jet s = sin(th);
    return std::array<Jet, 3>{s * cos(ph), s * sin(ph), cos(th)};
  };
  p.chart = [unit, a, b](const JetPoint& u) {
    auto x = unit(u[0], u[1]);
    auto y = unit(u[2], u[3]);
    return JetVec{a * x[0], a * x[1], a * x[2], b * y[0], b * y[1], b * y[2]};
  };
  p.normal_frame = [unit](const JetPoint& u) {
    auto x = unit(u[0], u[1]);
    auto y = unit(u[2], u[3]);
    Jet z(0.0);
    return std::vector<JetVec>{{x[0], x[1], x[2], z, z, z}, {z, z, z, y[0], y[1], y[2]}};
  };
  const double pi = M_PI;
  p.lo = {0, 0, 0, 0};
  p.hi = {pi, 2 * pi, pi, 2 * pi};
  p.axes = {AxisKind::Interval, AxisKind::Periodic, AxisKind::Interval, AxisKind::Periodic};
  p.closed = true;
  p.euler = 4;
  return p;
}

ImmersionPatch preset_helicoid_product(double c1, double c2) {
  ImmersionPatch p;
  p.name = "helicoid";
  p.m = 6;
  auto helicoid = [](const Jet& s, const Jet& t, double c) {
    return std::array<Jet, 3>{s * cos(t), s * sin(t), c * t};
  };
  auto normal = [](const Jet& s, const Jet& t, double c) {
    Jet inv = reciprocal(sqrt(s * s + c * c));
    return std::array<Jet, 3>{c * sin(t) * inv, -c * cos(t) * inv, s * inv};
  };
  p.chart = [helicoid, c1, c2](const JetPoint& u) {
    auto x = helicoid(u[0], u[1], c1);
    auto y = helicoid(u[2], u[3], c2);
    return JetVec{x[0], x[1], x[2], y[0], y[1], y[2]};
  };
  p.normal_frame = [normal, c1, c2](const JetPoint& u) {
    auto x = normal(u[0], u[1], c1);
    auto y = normal(u[2], u[3], c2);
    Jet z(0.0);
    return std::vector<JetVec>{{x[0], x[1], x[2], z, z, z}, {z, z, z, y[0], y[1], y[2]}};
  };
  const double pi = M_PI;
  p.lo = {-1, -pi, -1, -pi};
  p.hi = {1, pi, 1, pi};
  p.axes = {AxisKind::Interval, AxisKind::Interval, AxisKind::Interval, AxisKind::Interval};
  return p;
}

ImmersionPatch preset(const std::string& name, const std::vector<double>& params) {
  auto par = [&](std::size_t i, double def) { return i < params.size() ? params[i] : def; };
  if (name == "flat") return preset_flat(int(par(0, 5)));
  if (name == "sphere") return preset_sphere(par(0, 1.0));
  if (name == "torus") return preset_clifford_torus(par(0, 1.0));
  if (name == "s2xs2") return preset_s2xs2(par(0, 1.0), par(1, 1.3));
  if (name == "helicoid") return preset_helicoid_product(par(0, 1.0), par(1, 0.7));
  throw std::invalid_argument("unknown preset '" + name + "'");
}

TrigField TrigField::random(int m, std::uint64_t seed, int terms, double max_freq) {
  std::mt19937_64 rng(seed);
  auto u = [&] { return 2.0 * unit_uniform(rng()) - 1.0; };
  TrigField f;
  f.m = m;
  for (int t = 0; t < terms; ++t) {
    std::vector<double> a(m), w(m);
    for (int i = 0; i < m; ++i) {
      a[i] = u();
      w[i] = max_freq * u();
    }
    f.amp.push_back(a);
    f.freq.push_back(w);
    f.phase.push_back(M_PI * u());
  }
  return f;
}

JetVec TrigField::operator()(const JetVec& x) const {
  int deg = x.empty() ? Jet::kOrder : x[0].deg();
  JetVec b(m, Jet::zero(deg));
  for (std::size_t t = 0; t < amp.size(); ++t) {
    Jet arg(phase[t]);
    for (int i = 0; i < m; ++i) arg += freq[t][i] * x[i];
    Jet s = sin(arg);
    for (int i = 0; i < m; ++i) b[i] += amp[t][i] * s;
  }
  return b;
}

ImmersionPatch perturb_normal_fields(const ImmersionPatch& base, const std::vector<TrigField>& fields,
                                     const std::vector<double>& coeffs) {
  if (!base.normal_frame)
    throw std::invalid_argument("perturb_normal: base patch has no closed-form normal frame");
  if (fields.size() != coeffs.size())
    throw std::invalid_argument("perturb_normal: field/coefficient count mismatch");
  ImmersionPatch p = base;
  auto chart = base.chart;
  auto frame = base.normal_frame;
  int m = base.m;
  p.chart = [chart, frame, fields, coeffs, m](const JetPoint& u) {
    JetVec x = chart(u);
    bool any = false;
    for (double c : coeffs) any = any || c != 0.0;
    if (!any) return x;
    JetVec b(m, Jet(0.0));
    for (std::size_t k = 0; k < fields.size(); ++k) {
      if (coeffs[k] == 0.0) continue;
      JetVec bk = fields[k](x);
      for (int i = 0; i < m; ++i) b[i] += coeffs[k] * bk[i];
    }
    JetVec out = x;
    for (const JetVec& nu : frame(u)) {
      Jet s(0.0);
      for (int i = 0; i < m; ++i) s += b[i] * nu[i];
      for (int i = 0; i < m; ++i) out[i] += s * nu[i];
    }
    return out;
  };
  p.normal_frame = nullptr;
  std::ostringstream os;
  os << "perturb_normal(" << fields.size() << " fields)";
  p.history.push_back(os.str());
  return p;
}

ImmersionPatch perturb_normal(const ImmersionPatch& base, double eps, std::uint64_t seed) {
  if (eps == 0.0) return base;
  TrigField f = TrigField::random(base.m, seed);
  double e = eps;
  for (int attempt = 0; attempt <= 5; ++attempt) {
    ImmersionPatch p = perturb_normal_fields(base, {f}, {e});
    bool ok = true;
    for (int k = 0; k < 64 && ok; ++k) {
      try {
        eval_jet(p, base.sample(seed, k), 1);
      } catch (const ImmersionError&) {
        ok = false;
      }
    }
    if (ok) {
      p.name = base.name + "+perturbed";
      std::ostringstream os;
      os << "perturb_normal(eps=" << e << ", seed=" << seed << ")";
      p.history.back() = os.str();
      return p;
    }
    e *= 0.5;
  }
  throw ImmersionError("perturb_normal: immersion lost after 5 amplitude halvings");
}

ImmersionPatch perturb_ambient(const ImmersionPatch& base, const TrigField& b, double eps) {
  if (b.m != base.m) throw std::invalid_argument("perturb_ambient: field dimension mismatch");
  return perturb_ambient(base, AmbientField(b), eps);
}

ImmersionPatch perturb_ambient(const ImmersionPatch& base, const AmbientField& b, double eps) {
  ImmersionPatch p = base;
  auto chart = base.chart;
  p.chart = [chart, b, eps](const JetPoint& u) {
    JetVec x = chart(u);
    if (eps == 0.0) return x;
    JetVec bx = b(x);
    if (bx.size() != x.size()) throw std::invalid_argument("perturb_ambient: field dimension mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += eps * bx[i];
    return x;
  };
  p.normal_frame = nullptr;
  std::ostringstream os;
  os << "perturb_ambient(eps=" << eps << ")";
  p.history.push_back(os.str());
  return p;
}

MoebiusMap& MoebiusMap::translate(std::vector<double> t) {
  steps.push_back({MoebiusStep::Kind::Translation, std::move(t), {}, 1.0});
  return *this;
}
MoebiusMap& MoebiusMap::rotate(std::vector<std::vector<double>> q) {
  int n = int(q.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0;
      for (int k = 0; k < n; ++k) s += q[k][i] * q[k][j];
      if (std::abs(s - (i == j ? 1.0 : 0.0)) > 1e-12)
        throw std::invalid_argument("rotation matrix is not orthogonal");
    }
  steps.push_back({MoebiusStep::Kind::Rotation, {}, std::move(q), 1.0});
  return *this;
}
MoebiusMap& MoebiusMap::dilate(double s) {
  if (!(s > 0)) throw std::invalid_argument("dilation factor must be positive");
  steps.push_back({MoebiusStep::Kind::Dilation, {}, {}, s});
  return *this;
}
MoebiusMap& MoebiusMap::invert(std::vector<double> center) {
  steps.push_back({MoebiusStep::Kind::Inversion, std::move(center), {}, 1.0});
  return *this;
}

namespace {
template <class T>
std::vector<T> apply_steps(const std::vector<MoebiusStep>& steps, std::vector<T> x) {
  const std::size_t m = x.size();
  for (const auto& s : steps) {
    switch (s.kind) {
      case MoebiusStep::Kind::Translation:
        for (std::size_t i = 0; i < m; ++i) x[i] += s.vec[i];
        break;
      case MoebiusStep::Kind::Dilation:
        for (auto& c : x) c = c * s.scale;
        break;
      case MoebiusStep::Kind::Rotation: {
        std::vector<T> y(m, T(0.0));
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < m; ++j) y[i] += s.rot[i][j] * x[j];
        x = y;
        break;
      }
      case MoebiusStep::Kind::Inversion: {
        T r2(0.0);
        for (std::size_t i = 0; i < m; ++i) {
          T d = x[i] - s.vec[i];
          r2 += d * d;
        }
        T inv;
        if constexpr (std::is_same_v<T, double>)
          inv = 1.0 / r2;
        else
          inv = reciprocal(r2);
        for (std::size_t i = 0; i < m; ++i) x[i] = s.vec[i] + (x[i] - s.vec[i]) * inv;
        break;
      }
    }
  }
  return x;
}
}  // namespace

JetVec MoebiusMap::apply(const JetVec& x) const { return apply_steps(steps, x); }
std::vector<double> MoebiusMap::apply(const std::vector<double>& x) const {
  return apply_steps(steps, x);
}

std::vector<std::vector<double>> plane_rotation(int m, int i, int j, double t) {
  std::vector<std::vector<double>> q(m, std::vector<double>(m, 0.0));
  for (int k = 0; k < m; ++k) q[k][k] = 1.0;
  q[i][i] = std::cos(t);
  q[j][j] = std::cos(t);
  q[i][j] = -std::sin(t);
  q[j][i] = std::sin(t);
  return q;
}

ImmersionPatch apply_moebius(const MoebiusMap& map, const ImmersionPatch& patch) {
  // Domain avoidance: every inversion center must stay off the surface, judged
  // on a sample of the image of the preceding steps.
  MoebiusMap prefix;
  for (const auto& s : map.steps) {
    if (s.kind == MoebiusStep::Kind::Inversion) {
      if (int(s.vec.size()) != patch.m)
        throw std::invalid_argument("inversion center has wrong dimension");
      double size = 0.0;
      auto dist2 = [&](const Point4& u) {
        JetVec phi = patch.chart(variables(u, 0));
        std::vector<double> x(patch.m);
        for (int i = 0; i < patch.m; ++i) x[i] = phi[i].value();
        x = prefix.apply(x);
        double d2 = 0, n2 = 0;
        for (int i = 0; i < patch.m; ++i) {
          d2 += (x[i] - s.vec[i]) * (x[i] - s.vec[i]);
          n2 += x[i] * x[i];
        }
        size = std::max(size, std::sqrt(n2));
        return d2;
      };
      // Coarse sampling, then compass search from the closest samples (the
      // random cloud alone is far too sparse in four dimensions).
      std::vector<std::pair<double, Point4>> cand;
      for (int k = 0; k < 4096; ++k) {
        Point4 u{};
        std::mt19937_64 rng(0xC0FFEEull + std::uint64_t(k));
        for (int a = 0; a < 4; ++a) u[a] = patch.lo[a] + (patch.hi[a] - patch.lo[a]) * unit_uniform(rng());
        cand.push_back({dist2(u), u});
      }
      std::partial_sort(cand.begin(), cand.begin() + 8, cand.end(),
                        [](const auto& a, const auto& b) { return a.first < b.first; });
      double dmin = cand[0].first;
      Point4 worst = cand[0].second;
      for (int c = 0; c < 8; ++c) {
        auto [d, u] = cand[c];
        double step = 0.25;
        for (int it = 0; it < 400 && step > 1e-7; ++it) {
          bool moved = false;
          for (int a = 0; a < 4 && !moved; ++a)
            for (double sg : {1.0, -1.0}) {
              Point4 v = u;
              v[a] = std::clamp(v[a] + sg * step * (patch.hi[a] - patch.lo[a]), patch.lo[a], patch.hi[a]);
              double dv = dist2(v);
              if (dv < d) {
                d = dv;
                u = v;
                moved = true;
                break;
              }
            }
          if (!moved) step *= 0.5;
        }
        if (d < dmin) {
          dmin = d;
          worst = u;
        }
      }
      if (std::sqrt(dmin) < 1e-3 * std::max(size, 1.0))
        throw ImmersionError("inversion center lies on the surface near sample u = " +
                             format_point(worst));
    }
    prefix.steps.push_back(s);
  }
  if (patch.m == 0) throw std::invalid_argument("empty patch");
  ImmersionPatch p = patch;
  auto chart = patch.chart;
  p.chart = [chart, map](const JetPoint& u) { return map.apply(chart(u)); };
  p.normal_frame = nullptr;
  p.name = patch.name + "+moebius";
  p.history.push_back("moebius(" + std::to_string(map.steps.size()) + " steps)");
  return p;
}

}  // namespace curv
