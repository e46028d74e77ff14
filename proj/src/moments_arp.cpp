#include "dplogit/moments_arp.hpp"

#include <cmath>

namespace dplogit {

namespace {

inline double E(double v) { return std::exp(v); }

ModelSpec make_spec(int p, int T, const RegressorPath& x) {
  ModelSpec spec;
  spec.p = p;
  spec.T = T;
  spec.K = static_cast<int>(x.cols());
  return spec;
}

inline double xdb(const RegressorPath& x, const Parameters& params, int t, int s) {
  if (x.cols() == 0) return 0.0;
  return (x.row(t - 1) - x.row(s - 1)).dot(params.beta);
}

bool matches(const OutcomePath& y, std::initializer_list<int> pattern) {
  int i = 0;
  for (int v : pattern) {
    if (y(i++) != v) return false;
  }
  return true;
}

void check_x_eq(const RegressorPath& x, int a, int b, double tol, const char* where) {
  if (x.cols() == 0) return;
  if ((x.row(a - 1) - x.row(b - 1)).cwiseAbs().maxCoeff() > tol)
    throw std::invalid_argument(std::string(where) + ": regressor equality precondition violated");
}

}  // namespace

double moment_p2_t4(P2T4Variant variant, const InitialCondition& y0, const OutcomePath& y, const RegressorPath& x,
                    const Parameters& params) {
  if (y.size() != 4 || y0.size() != 2) throw std::invalid_argument("moment_p2_t4: p=2, T=4 required");
  const ModelSpec spec = make_spec(2, 4, x);
  const double g1 = params.gamma(0);
  const auto z = [&](int a, int b) { return single_index_diff(spec, params, y0, y, x, a, b); };

  switch (variant) {
    case P2T4Variant::A:
      if (matches(y, {0, 0, 1, 0})) return E(z(2, 3)) - E(z(4, 3));
      if (matches(y, {0, 0, 1, 1})) return E(z(2, 4)) - 1.0;
      if (matches(y, {0, 1})) return -1.0;
      if (matches(y, {1, 0, 0})) return E(z(4, 1) + g1);
      if (matches(y, {1, 0, 1, 0})) return E(z(4, 1)) * (1.0 + E(z(2, 3)) - E(z(4, 3)));
      if (matches(y, {1, 0, 1, 1})) return E(z(2, 1));
      return 0.0;
    case P2T4Variant::B:
      if (matches(y, {0, 1, 0, 0})) return E(z(1, 2));
      if (matches(y, {0, 1, 0, 1})) return E(z(1, 4)) * (1.0 + E(z(3, 2)) - E(z(3, 4)));
      if (matches(y, {0, 1, 1})) return E(z(1, 4) + g1);
      if (matches(y, {1, 0})) return -1.0;
      if (matches(y, {1, 1, 0, 0})) return E(z(4, 2)) - 1.0;
      if (matches(y, {1, 1, 0, 1})) return E(z(3, 2)) - E(z(3, 4));
      return 0.0;
    case P2T4Variant::C:
      if (matches(y, {0, 0, 0, 1})) return (E(z(2, 4)) - 1.0) * (1.0 - E(z(3, 4)));
      if (matches(y, {0, 0, 1})) return E(z(2, 4) + g1) - 1.0;
      if (matches(y, {0, 1})) return -1.0;
      if (matches(y, {1, 0, 0, 0})) return E(z(4, 1));
      if (matches(y, {1, 0, 0, 1})) return E(z(2, 1)) * (1.0 + E(z(3, 2)) - E(z(3, 4)));
      if (matches(y, {1, 0, 1})) return E(z(2, 1));
      return 0.0;
    case P2T4Variant::D:
      if (matches(y, {0, 1, 0})) return E(z(1, 2));
      if (matches(y, {0, 1, 1, 0})) return E(z(1, 2)) * (1.0 + E(z(2, 3)) - E(z(4, 3)));
      if (matches(y, {0, 1, 1, 1})) return E(z(1, 4));
      if (matches(y, {1, 0})) return -1.0;
      if (matches(y, {1, 1, 0})) return E(z(4, 2) + g1) - 1.0;
      if (matches(y, {1, 1, 1, 0})) return (E(z(4, 2)) - 1.0) * (1.0 - E(z(4, 3)));
      return 0.0;
  }
  throw std::invalid_argument("moment_p2_t4: unsupported variant");
}

double moment_p2_t4_explicit00(P2T4Variant variant, const OutcomePath& y, const RegressorPath& x,
                               const Parameters& params) {
  if (y.size() != 4) throw std::invalid_argument("moment_p2_t4_explicit00: T=4 required");
  const double g1 = params.gamma(0);
  const double g2 = params.gamma(1);
  const auto xb = [&](int t, int s) { return xdb(x, params, t, s); };

  switch (variant) {
    case P2T4Variant::A:
      if (matches(y, {0, 0, 1, 0})) return E(xb(2, 3)) - E(xb(4, 3) + g1);
      if (matches(y, {0, 0, 1, 1})) return E(xb(2, 4) - g1) - 1.0;
      if (matches(y, {0, 1})) return -1.0;
      if (matches(y, {1, 0, 0})) return E(xb(4, 1) + g1);
      if (matches(y, {1, 0, 1, 0}))
        return E(xb(4, 1) + g1) * (1.0 + E(xb(2, 3) + g1 - g2) - E(xb(4, 3) + g1 - g2));
      if (matches(y, {1, 0, 1, 1})) return E(xb(2, 1) + g1);
      return 0.0;
    case P2T4Variant::B:
      if (matches(y, {0, 1, 0, 0})) return E(xb(1, 2));
      if (matches(y, {0, 1, 0, 1})) return E(xb(1, 4) - g2) * (1.0 + E(xb(3, 2) + g1) - E(xb(3, 4) + g1 - g2));
      if (matches(y, {0, 1, 1})) return E(xb(1, 4) - g2);
      if (matches(y, {1, 0})) return -1.0;
      if (matches(y, {1, 1, 0, 0})) return E(xb(4, 2) - g1 + g2) - 1.0;
      if (matches(y, {1, 1, 0, 1})) return E(xb(3, 2) + g2) - E(xb(3, 4) + g1);
      return 0.0;
    case P2T4Variant::C:
      if (matches(y, {0, 0, 0, 1})) return (E(xb(2, 4)) - 1.0) * (1.0 - E(xb(3, 4)));
      if (matches(y, {0, 0, 1})) return E(xb(2, 4)) - 1.0;
      if (matches(y, {0, 1})) return -1.0;
      if (matches(y, {1, 0, 0, 0})) return E(xb(4, 1));
      if (matches(y, {1, 0, 0, 1})) return E(xb(2, 1) + g1) * (1.0 - E(xb(3, 4) + g2) + E(xb(3, 2) - g1 + g2));
      if (matches(y, {1, 0, 1})) return E(xb(2, 1) + g1);
      return 0.0;
    case P2T4Variant::D:
      if (matches(y, {0, 1, 0})) return E(xb(1, 2));
      if (matches(y, {0, 1, 1, 0})) return E(xb(1, 2)) * (1.0 + E(xb(2, 3) - g1) - E(xb(4, 3) + g2));
      if (matches(y, {0, 1, 1, 1})) return E(xb(1, 4) - g1 - g2);
      if (matches(y, {1, 0})) return -1.0;
      if (matches(y, {1, 1, 0})) return E(xb(4, 2) + g2) - 1.0;
      if (matches(y, {1, 1, 1, 0})) return (E(xb(4, 2) + g2) - 1.0) * (1.0 - E(xb(4, 3)));
      return 0.0;
  }
  throw std::invalid_argument("moment_p2_t4_explicit00: unsupported variant");
}

double moment_p3_t5(P3T5Variant variant, const InitialCondition& y0, const OutcomePath& y, const RegressorPath& x,
                    const Parameters& params) {
  if (y.size() != 5 || y0.size() != 3) throw std::invalid_argument("moment_p3_t5: p=3, T=5 required");
  const ModelSpec spec = make_spec(3, 5, x);
  const double g1 = params.gamma(0);
  const double g2 = params.gamma(1);
  const auto z = [&](int a, int b) { return single_index_diff(spec, params, y0, y, x, a, b); };

  switch (variant) {
    case P3T5Variant::A:
      if (matches(y, {0, 0, 1, 0, 0})) return E(z(2, 3)) - E(z(5, 3));
      if (matches(y, {0, 0, 1, 0, 1})) return (E(z(4, 3)) - E(z(4, 5)) + 1.0) * (E(z(2, 5)) - 1.0);
      if (matches(y, {0, 0, 1, 1})) return E(g1 + z(2, 5)) - 1.0;
      if (matches(y, {0, 1})) return -1.0;
      if (matches(y, {1, 0, 0, 0})) return E(g2 + z(5, 1));
      if (matches(y, {1, 0, 0, 1})) return E(-g1 + g2 + z(5, 1));
      if (matches(y, {1, 0, 1, 0, 0})) return E(z(5, 1)) * (E(z(2, 3)) - E(z(5, 3)) + 1.0);
      if (matches(y, {1, 0, 1, 0, 1}))
        return E(z(2, 1)) + E(z(4, 1)) + E(z(2, 1) + z(4, 3)) - E(z(2, 1) + z(4, 5)) - E(z(4, 1) + z(5, 3));
      if (matches(y, {1, 0, 1, 1})) return E(z(2, 1));
      return 0.0;
    case P3T5Variant::B:
      if (matches(y, {0, 1, 0, 0})) return E(z(1, 2));
      if (matches(y, {0, 1, 0, 1, 0}))
        return E(z(1, 2)) + E(z(1, 4)) + E(z(1, 2) + z(3, 4)) - E(z(1, 4) + z(3, 5)) - E(z(1, 2) + z(5, 4));
      if (matches(y, {0, 1, 0, 1, 1})) return E(z(1, 5)) * (E(z(3, 2)) - E(z(3, 5)) + 1.0);
      if (matches(y, {0, 1, 1, 0})) return E(-g1 + g2 + z(1, 5));
      if (matches(y, {0, 1, 1, 1})) return E(g2 + z(1, 5));
      if (matches(y, {1, 0})) return -1.0;
      if (matches(y, {1, 1, 0, 0})) return E(g1 + z(5, 2)) - 1.0;
      if (matches(y, {1, 1, 0, 1, 0})) return (E(z(3, 4)) - E(z(5, 4)) + 1.0) * (E(z(5, 2)) - 1.0);
      if (matches(y, {1, 1, 0, 1, 1})) return E(z(3, 2)) - E(z(3, 5));
      return 0.0;
    case P3T5Variant::C:
      if (matches(y, {0, 0, 0, 1, 0})) return -E(z(5, 4)) * (1.0 - E(z(2, 5))) * (1.0 - E(z(3, 5)));
      if (matches(y, {0, 0, 0, 1, 1})) return (E(z(2, 5)) - 1.0) * (1.0 - E(z(3, 5)));
      if (matches(y, {0, 0, 1, 0})) return E(-g1 + g2 + z(2, 5)) - 1.0;
      if (matches(y, {0, 0, 1, 1})) return E(g2 + z(2, 5)) - 1.0;
      if (matches(y, {0, 1})) return -1.0;
      if (matches(y, {1, 0, 0, 0})) return E(g1 + z(5, 1));
      if (matches(y, {1, 0, 0, 1, 0}))
        return -E(z(2, 1) + z(3, 4)) + E(z(5, 1)) + E(z(2, 1) + z(5, 4)) + E(z(3, 1) + z(5, 4)) -
               E(z(5, 1) + z(5, 4));
      if (matches(y, {1, 0, 0, 1, 1})) return E(z(2, 1)) + E(z(3, 1)) - E(z(2, 1) + z(3, 5));
      if (matches(y, {1, 0, 1})) return E(z(2, 1));
      return 0.0;
    case P3T5Variant::D:
      if (matches(y, {0, 1, 0, 0})) return E(z(1, 2));
      if (matches(y, {0, 1, 1, 0, 0})) return E(z(1, 2)) + E(z(1, 3)) - E(z(1, 2) + z(5, 3));
      if (matches(y, {0, 1, 1, 0, 1}))
        return E(z(1, 5)) - E(z(1, 2) + z(4, 3)) + E(z(1, 2) + z(4, 5)) + E(z(1, 3) + z(4, 5)) -
               E(z(1, 5) + z(4, 5));
      if (matches(y, {0, 1, 1, 1})) return E(g1 + z(1, 5));
      if (matches(y, {1, 0})) return -1.0;
      if (matches(y, {1, 1, 0, 0})) return E(g2 + z(5, 2)) - 1.0;
      if (matches(y, {1, 1, 0, 1})) return E(-g1 + g2 + z(5, 2)) - 1.0;
      if (matches(y, {1, 1, 1, 0, 0})) return (E(z(5, 2)) - 1.0) * (1.0 - E(z(5, 3)));
      if (matches(y, {1, 1, 1, 0, 1})) return -E(z(4, 5)) * (1.0 - E(z(5, 2))) * (1.0 - E(z(5, 3)));
      return 0.0;
    case P3T5Variant::E:
      if (matches(y, {0, 0, 1, 0})) return E(z(2, 3)) - E(g1 + z(5, 3));
      if (matches(y, {0, 0, 1, 1, 0})) return (E(z(2, 3)) - E(z(5, 3))) * (E(z(3, 4)) - E(z(5, 4)) + 1.0);
      if (matches(y, {0, 0, 1, 1, 1})) return E(z(2, 5)) - 1.0;
      if (matches(y, {0, 1})) return -1.0;
      if (matches(y, {1, 0, 0, 0})) return E(g1 + g2 + z(5, 1));
      if (matches(y, {1, 0, 0, 1})) return E(g2 + z(5, 1));
      if (matches(y, {1, 0, 1, 0})) return E(g1 + z(5, 1)) * (-E(g1 + z(5, 3)) + E(z(2, 3)) + 1.0);
      if (matches(y, {1, 0, 1, 1, 0}))
        return E(z(5, 1)) * (E(z(2, 3)) + E(z(2, 4)) - E(z(5, 3)) - E(z(5, 4)) - E(z(2, 3) + z(5, 4)) +
                             E(z(5, 3) + z(5, 4)) + 1.0);
      if (matches(y, {1, 0, 1, 1, 1})) return E(z(2, 1));
      return 0.0;
    case P3T5Variant::F:
      if (matches(y, {0, 1, 0, 0, 0})) return E(z(1, 2));
      if (matches(y, {0, 1, 0, 0, 1}))
        return E(z(1, 5)) * (E(z(3, 2)) - E(z(3, 5)) + E(z(4, 2)) - E(z(4, 5)) - E(z(3, 2) + z(4, 5)) +
                             E(z(3, 5) + z(4, 5)) + 1.0);
      if (matches(y, {0, 1, 0, 1})) return E(g1 + z(1, 5)) * (-E(g1 + z(3, 5)) + E(z(3, 2)) + 1.0);
      if (matches(y, {0, 1, 1, 0})) return E(g2 + z(1, 5));
      if (matches(y, {0, 1, 1, 1})) return E(g1 + g2 + z(1, 5));
      if (matches(y, {1, 0})) return -1.0;
      if (matches(y, {1, 1, 0, 0, 0})) return E(z(5, 2)) - 1.0;
      if (matches(y, {1, 1, 0, 0, 1})) return (E(z(3, 2)) - E(z(3, 5))) * (E(z(4, 3)) - E(z(4, 5)) + 1.0);
      if (matches(y, {1, 1, 0, 1})) return E(z(3, 2)) - E(g1 + z(3, 5));
      return 0.0;
    case P3T5Variant::G:
      if (matches(y, {0, 0, 0, 0, 1})) return (E(z(2, 5)) - 1.0) * (1.0 - E(z(3, 5))) * (1.0 - E(z(4, 5)));
      if (matches(y, {0, 0, 0, 1})) return (E(g1 + z(2, 5)) - 1.0) * (1.0 - E(g1 + z(3, 5)));
      if (matches(y, {0, 0, 1, 0})) return E(g2 + z(2, 5)) - 1.0;
      if (matches(y, {0, 0, 1, 1})) return E(g1 + g2 + z(2, 5)) - 1.0;
      if (matches(y, {0, 1})) return -1.0;
      if (matches(y, {1, 0, 0, 0, 0})) return E(z(5, 1));
      if (matches(y, {1, 0, 0, 0, 1}))
        return E(z(2, 1)) + E(z(3, 1)) - E(z(2, 1) + z(3, 5)) + E(z(4, 1)) - E(z(2, 1) + z(4, 5)) -
               E(z(3, 1) + z(4, 5)) + E(z(2, 1) + z(3, 5) + z(4, 5));
      if (matches(y, {1, 0, 0, 1})) return -E(g1 + z(2, 1) + z(3, 5)) + E(z(2, 1)) + E(z(3, 1));
      if (matches(y, {1, 0, 1})) return E(z(2, 1));
      return 0.0;
    case P3T5Variant::H:
      if (matches(y, {0, 1, 0})) return E(z(1, 2));
      if (matches(y, {0, 1, 1, 0})) return -E(g1 + z(1, 2) + z(5, 3)) + E(z(1, 2)) + E(z(1, 3));
      if (matches(y, {0, 1, 1, 1, 0}))
        return E(z(1, 2)) + E(z(1, 3)) + E(z(1, 4)) - E(z(1, 2) + z(5, 3)) - E(z(1, 2) + z(5, 4)) -
               E(z(1, 3) + z(5, 4)) + E(z(1, 2) + z(5, 3) + z(5, 4));
      if (matches(y, {0, 1, 1, 1, 1})) return E(z(1, 5));
      if (matches(y, {1, 0})) return -1.0;
      if (matches(y, {1, 1, 0, 0})) return E(g1 + g2 + z(5, 2)) - 1.0;
      if (matches(y, {1, 1, 0, 1})) return E(g2 + z(5, 2)) - 1.0;
      if (matches(y, {1, 1, 1, 0})) return (E(g1 + z(5, 2)) - 1.0) * (1.0 - E(g1 + z(5, 3)));
      if (matches(y, {1, 1, 1, 1, 0})) return (E(z(5, 2)) - 1.0) * (1.0 - E(z(5, 3))) * (1.0 - E(z(5, 4)));
      return 0.0;
  }
  throw std::invalid_argument("moment_p3_t5: unsupported variant");
}

std::vector<P2T5Tag> p2_t5_all_tags() {
  std::vector<P2T5Tag> tags;
  for (int v = 0; v < 4; ++v) tags.push_back({P2T5Tag::Group::head, v});
  for (int v = 0; v < 4; ++v) tags.push_back({P2T5Tag::Group::shifted0, v});
  for (int v = 0; v < 4; ++v) tags.push_back({P2T5Tag::Group::shifted1, v});
  for (int v = 0; v < 8; ++v) tags.push_back({P2T5Tag::Group::embedded, v});
  return tags;
}

double moment_p2_t5_family(const P2T5Tag& tag, const InitialCondition& y0, const OutcomePath& y,
                           const RegressorPath& x, const Parameters& params) {
  if (y.size() != 5 || y0.size() != 2) throw std::invalid_argument("moment_p2_t5_family: p=2, T=5 required");
  switch (tag.group) {
    case P2T5Tag::Group::head: {
      if (tag.variant < 0 || tag.variant > 3) throw std::invalid_argument("moment_p2_t5_family: bad variant");
      return moment_p2_t4(static_cast<P2T4Variant>(tag.variant), y0, y.head(4), x.topRows(4), params);
    }
    case P2T5Tag::Group::shifted0:
    case P2T5Tag::Group::shifted1: {
      if (tag.variant < 0 || tag.variant > 3) throw std::invalid_argument("moment_p2_t5_family: bad variant");
      const int want = tag.group == P2T5Tag::Group::shifted0 ? 0 : 1;
      if (y(0) != want) return 0.0;
      InitialCondition shifted(2);
      shifted << y0(1), y(0);
      return moment_p2_t4(static_cast<P2T4Variant>(tag.variant), shifted, y.tail(4), x.bottomRows(4), params);
    }
    case P2T5Tag::Group::embedded: {
      if (tag.variant < 0 || tag.variant > 7) throw std::invalid_argument("moment_p2_t5_family: bad variant");
      InitialCondition init3(3);
      init3 << 0, y0(0), y0(1);
      Parameters par3;
      par3.beta = params.beta;
      par3.gamma = Eigen::Vector3d(params.gamma(0), params.gamma(1), 0.0);
      return moment_p3_t5(static_cast<P3T5Variant>(tag.variant), init3, y, x, par3);
    }
  }
  throw std::invalid_argument("moment_p2_t5_family: unsupported tag");
}

Eigen::Vector4d p2_t5_dependency_residuals(const InitialCondition& y0, const OutcomePath& y, const RegressorPath& x,
                                           const Parameters& params) {
  const double g1 = params.gamma(0);
  const double g2 = params.gamma(1);
  const double ym1 = y0(0);  // y_{-1}
  const double yz = y0(1);   // y_0
  const auto xb = [&](int t, int s) { return xdb(x, params, t, s); };
  const auto head = [&](int v) { return moment_p2_t5_family({P2T5Tag::Group::head, v}, y0, y, x, params); };
  const auto breve = [&](int v) { return moment_p2_t5_family({P2T5Tag::Group::shifted0, v}, y0, y, x, params); };
  const auto tilde = [&](int v) { return moment_p2_t5_family({P2T5Tag::Group::shifted1, v}, y0, y, x, params); };
  const auto ddot = [&](int v) { return moment_p2_t5_family({P2T5Tag::Group::embedded, v}, y0, y, x, params); };
  (void)head;

  Eigen::Vector4d res;
  // indices: a=0, b=1, c=2, d=3 for T=4 variants; a..h = 0..7 for embedded
  res(0) = E(yz * g1 + ym1 * g2) * (ddot(2) - breve(0)) + E(xb(2, 5) + (yz - 1.0) * g1 + (ym1 + yz) * g2) * breve(0) +
           E(g1 + xb(5, 1)) * (ddot(1) - tilde(0)) + E(g1 + xb(2, 1) + yz * g2) * tilde(0);
  res(1) = E(xb(2, 5) + (yz + 1.0) * g1 + (ym1 + yz - 1.0) * g2) * (ddot(0) - breve(1)) +
           E((yz + 1.0) * g1 + ym1 * g2) * breve(1) + E(g1 + xb(2, 1) + yz * g2) * (ddot(3) - tilde(1)) +
           E(g2 + xb(5, 1)) * tilde(1);
  res(2) = E(yz * g1 + ym1 * g2) * (ddot(6) - breve(2)) + E(xb(2, 5) + yz * g1 + (ym1 + yz) * g2) * breve(2) +
           E(xb(5, 1)) * (ddot(5) - tilde(2)) + E(g1 + xb(2, 1) + yz * g2) * tilde(2);
  res(3) = E(xb(2, 5) + (yz - 1.0) * g1 + (ym1 + yz - 1.0) * g2) * (ddot(4) - breve(3)) +
           E(yz * g1 + ym1 * g2) * breve(3) + E(xb(2, 1) + yz * g2) * (ddot(7) - tilde(3)) +
           E(g2 + xb(5, 1)) * tilde(3);
  return res;
}

double moment_p2_nox_t3(const InitialCondition& y0, const OutcomePath& y, const Eigen::VectorXd& gamma) {
  if (y.size() != 3 || y0.size() != 2) throw std::invalid_argument("moment_p2_nox_t3: p=2, T=3 required");
  const double g1 = gamma(0);
  const double g2 = gamma(1);
  const int i0 = y0(0), i1 = y0(1);
  if (i0 == 0 && i1 == 0) {
    if (matches(y, {0, 1, 0})) return 1.0;
    if (matches(y, {0, 1, 1})) return E(-g1);
    if (matches(y, {1, 0})) return -1.0;
    return 0.0;
  }
  if (i0 == 0 && i1 == 1) {
    if (matches(y, {0, 1})) return -1.0;
    if (matches(y, {1, 0, 0})) return E(g2 - g1);
    if (matches(y, {1, 0, 1})) return E(g2);
    return 0.0;
  }
  if (i0 == 1 && i1 == 0) {
    if (matches(y, {0, 1, 0})) return E(g2);
    if (matches(y, {0, 1, 1})) return E(g2 - g1);
    if (matches(y, {1, 0})) return -1.0;
    return 0.0;
  }
  if (matches(y, {0, 1})) return -1.0;
  if (matches(y, {1, 0, 0})) return E(-g1);
  if (matches(y, {1, 0, 1})) return 1.0;
  return 0.0;
}

namespace {

enum class InitPattern { zeros, zero_then_ones, one_then_zeros, ones, other };

InitPattern classify_init(const InitialCondition& y0) {
  const int p = static_cast<int>(y0.size());
  bool all0 = true, all1 = true;
  for (int i = 0; i < p; ++i) {
    all0 = all0 && y0(i) == 0;
    all1 = all1 && y0(i) == 1;
  }
  if (all0) return InitPattern::zeros;
  if (all1) return InitPattern::ones;
  bool tail1 = y0(0) == 0, tail0 = y0(0) == 1;
  for (int i = 1; i < p; ++i) {
    tail1 = tail1 && y0(i) == 1;
    tail0 = tail0 && y0(i) == 0;
  }
  if (tail1) return InitPattern::zero_then_ones;
  if (tail0) return InitPattern::one_then_zeros;
  return InitPattern::other;
}

}  // namespace

double moment_arp_t3_xeq(const InitialCondition& y0, const OutcomePath& y, const RegressorPath& x,
                         const Parameters& params, double x_eq_tol) {
  const int p = static_cast<int>(y0.size());
  if (p < 2 || y.size() != 3) throw std::invalid_argument("moment_arp_t3_xeq: p >= 2, T=3 required");
  check_x_eq(x, 2, 3, x_eq_tol, "moment_arp_t3_xeq");
  const double g1 = params.gamma(0);
  const double gp = params.gamma(p - 1);
  const auto xb = [&](int t, int s) { return xdb(x, params, t, s); };

  switch (classify_init(y0)) {
    case InitPattern::zeros:
      if (matches(y, {0, 1, 0})) return E(xb(1, 2));
      if (matches(y, {0, 1, 1})) return E(xb(1, 2) - g1);
      if (matches(y, {1, 0})) return -1.0;
      return 0.0;
    case InitPattern::zero_then_ones:
      if (matches(y, {0, 1})) return -1.0;
      if (matches(y, {1, 0, 0})) return E(xb(2, 1) - g1 + gp);
      if (matches(y, {1, 0, 1})) return E(xb(2, 1) + gp);
      return 0.0;
    case InitPattern::one_then_zeros:
      if (matches(y, {0, 1, 0})) return E(xb(1, 2) + gp);
      if (matches(y, {0, 1, 1})) return E(xb(1, 2) - g1 + gp);
      if (matches(y, {1, 0})) return -1.0;
      return 0.0;
    case InitPattern::ones:
      if (matches(y, {0, 1})) return -1.0;
      if (matches(y, {1, 0, 0})) return E(xb(2, 1) - g1);
      if (matches(y, {1, 0, 1})) return E(xb(2, 1));
      return 0.0;
    case InitPattern::other:
      break;
  }
  throw std::invalid_argument("moment_arp_t3_xeq: unsupported initial condition");
}

double moment_arp_t4_xeq(PT4Variant variant, const InitialCondition& y0, const OutcomePath& y, const RegressorPath& x,
                         const Parameters& params, double x_eq_tol) {
  const int p = static_cast<int>(y0.size());
  if (p < 3 || y.size() != 4) throw std::invalid_argument("moment_arp_t4_xeq: p >= 3, T=4 required");
  check_x_eq(x, 3, 4, x_eq_tol, "moment_arp_t4_xeq");
  const double g1 = params.gamma(0);
  const double g2 = params.gamma(1);
  const double gpm1 = params.gamma(p - 2);
  const double gp = params.gamma(p - 1);
  const auto xb = [&](int t, int s) { return xdb(x, params, t, s); };

  const InitPattern pattern = classify_init(y0);
  const bool init_zero = pattern == InitPattern::zeros;

  switch (variant) {
    case PT4Variant::A: {
      if (!init_zero) throw std::invalid_argument("moment_arp_t4_xeq: variant A requires y0 = 0_p");
      if (y(0) != 0) return 0.0;
      InitialCondition zeros = InitialCondition::Zero(p);
      RegressorPath xs;
      if (x.cols() > 0) {
        xs.resize(3, x.cols());
        xs.row(0) = x.row(1);
        xs.row(1) = x.row(2);
        xs.row(2) = x.row(3);
      } else {
        xs.resize(3, 0);
      }
      return moment_arp_t3_xeq(zeros, y.tail(3), xs, params, x_eq_tol);
    }
    case PT4Variant::B: {
      if (!init_zero) throw std::invalid_argument("moment_arp_t4_xeq: variant B requires y0 = 0_p");
      Parameters par2;
      par2.beta = params.beta;
      par2.gamma = Eigen::Vector2d(g1, g2);
      return moment_p2_t4_explicit00(P2T4Variant::D, y, x, par2);
    }
    case PT4Variant::C: {
      if (!init_zero) throw std::invalid_argument("moment_arp_t4_xeq: variant C requires y0 = 0_p");
      if (matches(y, {0, 0, 1, 0})) return -E(g1);
      if (matches(y, {0, 0, 1, 1})) return -1.0;
      if (matches(y, {0, 1, 0, 0})) return E(xb(3, 2)) * (E(g1) - E(g2));
      if (matches(y, {0, 1, 0, 1})) return E(g1 - g2) - 1.0;
      if (matches(y, {0, 1, 1})) return -1.0;
      if (matches(y, {1, 0, 0})) return E(xb(3, 1) + g2);
      if (matches(y, {1, 0, 1})) return E(xb(2, 1) + g1);
      return 0.0;
    }
    case PT4Variant::C_alt: {
      bool ok = y0(0) == 0 && y0(1) == 1;
      for (int i = 2; i < p; ++i) ok = ok && y0(i) == 0;
      if (!ok) throw std::invalid_argument("moment_arp_t4_xeq: variant C_alt requires y0 = (0,1,0_{p-2})");
      if (matches(y, {0, 0, 1, 0})) return -E(g1);
      if (matches(y, {0, 0, 1, 1})) return -1.0;
      if (matches(y, {0, 1, 0, 0})) return E(xb(3, 2) - gp) * (E(g1) - E(g2));
      if (matches(y, {0, 1, 0, 1})) return E(g1 - g2) - 1.0;
      if (matches(y, {0, 1, 1})) return -1.0;
      if (matches(y, {1, 0, 0})) return E(xb(3, 1) + g2 - gpm1);
      if (matches(y, {1, 0, 1})) return E(xb(2, 1) + g1 - gpm1 + gp);
      return 0.0;
    }
  }
  throw std::invalid_argument("moment_arp_t4_xeq: unsupported variant");
}

MonotonicityReport identification_diag_arp(ArpTheorem theorem, const DgpConfig& dgp, long draws,
                                           const Eigen::VectorXd& grid, std::uint64_t seed, int n_threads) {
  if (grid.size() < 3) throw std::invalid_argument("identification_diag_arp: need at least 3 grid points");
  const int p = dgp.spec.p;
  PanelDataset data =
      simulate_panel(dgp.spec, dgp.params, dgp.fe_rule, dgp.x_rule, static_cast<int>(draws), seed,
                     {.n_threads = n_threads});

  // conditioning pattern and varied parameter index (into gamma)
  InitialCondition want(p);
  int vary = 0;
  switch (theorem) {
    case ArpTheorem::T2i:
      want.setZero();
      vary = 0;  // gamma_1
      break;
    case ArpTheorem::T2ii:
      want.setOnes();
      want(0) = 0;  // (0, 1_{p-1})
      vary = p - 1;
      break;
    case ArpTheorem::T4:
      if (p != 3 || dgp.spec.T != 4) throw std::invalid_argument("identification_diag_arp: T4 needs p=3, T=4");
      want.setZero();
      want(1) = 1;  // (0,1,0)
      vary = 1;     // gamma_2
      break;
  }

  std::vector<const Individual*> matched;
  for (const Individual& ind : data.individuals) {
    const InitialCondition y0 = data.initial_condition(ind);
    if ((y0 == want).all()) matched.push_back(&ind);
  }
  MonotonicityReport rep;
  rep.grid = grid;
  rep.used = static_cast<long>(matched.size());
  if (matched.empty()) throw std::runtime_error("identification_diag_arp: empty conditioning set");

  const auto eval_mean = [&](const Parameters& par, double* se) {
    double sum = 0.0, sumsq = 0.0;
    for (const Individual* ind : matched) {
      const OutcomePath y = data.outcomes(*ind);
      const RegressorPath x = data.regressors(*ind);
      double m = 0.0;
      if (theorem == ArpTheorem::T4)
        m = moment_arp_t4_xeq(PT4Variant::C_alt, want, y, x, par, 1e-9);
      else
        m = moment_arp_t3_xeq(want, y, x, par, 1e-9);
      sum += m;
      sumsq += m * m;
    }
    const double n = static_cast<double>(matched.size());
    const double mean = sum / n;
    if (se) *se = n > 1 ? std::sqrt((sumsq / n - mean * mean) / (n - 1)) : 0.0;
    return mean;
  };

  rep.values.resize(grid.size());
  rep.std_errors.resize(grid.size());
  for (int i = 0; i < grid.size(); ++i) {
    Parameters par = dgp.params;
    par.gamma(vary) = grid(i);
    double se = 0.0;
    rep.values(i) = eval_mean(par, &se);
    rep.std_errors(i) = se;
  }
  rep.true_value = dgp.params.gamma(vary);
  rep.value_at_truth = eval_mean(dgp.params, &rep.se_at_truth);

  bool inc = true, dec = true;
  for (int i = 0; i + 1 < grid.size(); ++i) {
    inc = inc && rep.values(i + 1) > rep.values(i);
    dec = dec && rep.values(i + 1) < rep.values(i);
  }
  rep.strictly_monotone = inc || dec;
  rep.direction = inc ? +1 : (dec ? -1 : 0);
  for (int i = 0; i + 1 < grid.size(); ++i) {
    if (rep.values(i) == 0.0 || rep.values(i) * rep.values(i + 1) < 0.0) {
      rep.root_found = true;
      rep.root_lo = grid(i);
      rep.root_hi = grid(i + 1);
      break;
    }
  }
  return rep;
}

}  // namespace dplogit
