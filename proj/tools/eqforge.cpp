#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eqf/analysis.hpp"
#include "eqf/correspondence.hpp"
#include "eqf/io.hpp"
#include "eqf/random.hpp"
#include "eqf/sphere_geom.hpp"
#include "eqf/tensor_core.hpp"
#include "eqf/verification.hpp"
#include "eqf/version.hpp"

namespace {

using eqf::Mat;
using eqf::Vec;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void emit(const std::string& out, const std::string& contents) {
  if (out.empty() || out == "-") {
    std::cout << contents;
  } else {
    eqf::write_file_atomic(out, contents);
  }
}

std::vector<eqf::Equator> random_equators(int n, int count, std::uint64_t seed) {
  eqf::Rng rng(seed);
  std::vector<eqf::Equator> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out.emplace_back(rng.unit(n + 1));
  return out;
}

Vec parse_vector(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      values.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw UsageError("bad vector entry '" + item + "'");
    }
  }
  return Eigen::Map<const Vec>(values.data(), static_cast<Eigen::Index>(values.size()));
}

// Monomial such as "1", "x0", "x1^2", "2*x0*x3^3".
std::function<double(const Vec&)> parse_monomial(const std::string& text, int dim) {
  double scale = 1.0;
  std::vector<std::pair<int, int>> powers;
  std::stringstream ss(text);
  std::string factor;
  while (std::getline(ss, factor, '*')) {
    if (factor.empty()) throw UsageError("empty factor in '" + text + "'");
    if (factor[0] == 'x') {
      const auto caret = factor.find('^');
      int index = 0;
      int power = 1;
      try {
        index = std::stoi(factor.substr(1, caret == std::string::npos ? std::string::npos : caret - 1));
        if (caret != std::string::npos) power = std::stoi(factor.substr(caret + 1));
      } catch (const std::exception&) {
        throw UsageError("bad factor '" + factor + "'");
      }
      if (index < 0 || index >= dim || power < 0) throw UsageError("bad factor '" + factor + "'");
      powers.emplace_back(index, power);
    } else {
      try {
        scale *= std::stod(factor);
      } catch (const std::exception&) {
        throw UsageError("bad factor '" + factor + "'");
      }
    }
  }
  return [scale, powers](const Vec& p) {
    double value = scale;
    for (const auto& [i, k] : powers) value *= std::pow(p(i), k);
    return value;
  };
}

std::string radon_csv(const std::vector<eqf::Equator>& equators, const std::vector<double>& values) {
  std::ostringstream out;
  out.precision(17);
  const int dim = equators.empty() ? 0 : equators.front().n() + 1;
  for (int i = 0; i < dim; ++i) out << 'v' << i << ',';
  out << "radon\n";
  for (std::size_t e = 0; e < equators.size(); ++e) {
    for (int i = 0; i < dim; ++i) out << equators[e].normal()(i) << ',';
    out << values[e] << '\n';
  }
  return out.str();
}

struct Common {
  std::uint64_t seed = 1;
  std::string out;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Curvature tensors and spheres with minimal equators"};
  app.set_version_flag("--version", std::string(eqf::kVersion));
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Write a curvature tensor as JSON");
  std::string gen_kind;
  int gen_n = 3;
  int gen_m = 2;
  double gen_a = 1.0, gen_b = 1.0, gen_c = 1.0, gen_eps = 0.5;
  Common gen_common;
  gen->add_option("kind", gen_kind, "round | fubini-study | left-invariant | random")
      ->required()
      ->check(CLI::IsMember({"round", "fubini-study", "left-invariant", "random"}));
  gen->add_option("--n", gen_n, "Sphere dimension (round, random)")->check(CLI::Range(2, 12));
  gen->add_option("--m", gen_m, "Complex dimension (fubini-study)")->check(CLI::Range(1, 5));
  gen->add_option("--a", gen_a, "Left-invariant coefficient along i");
  gen->add_option("--b", gen_b, "Left-invariant coefficient along j");
  gen->add_option("--c", gen_c, "Left-invariant coefficient along k");
  gen->add_option("--eps", gen_eps, "Perturbation size (random)");
  gen->add_option("--seed", gen_common.seed, "Seed (random)");
  gen->add_option("--out", gen_common.out, "Output file (default stdout)");

  // verify
  auto* verify = app.add_subcommand("verify", "Run the verification suite; exit 1 on failure");
  std::string verify_input;
  eqf::VerifyOptions vopts;
  Common verify_common;
  std::map<std::string, double> tol_flags;
  verify->add_option("input", verify_input, "Tensor or metric fixture JSON")->required();
  verify->add_option("--seed", verify_common.seed, "Seed");
  verify->add_option("--samples", vopts.samples, "Sample count for pointwise checks")
      ->check(CLI::PositiveNumber);
  verify->add_option("--equators", vopts.equators, "Equators in the mean-curvature check")
      ->check(CLI::PositiveNumber);
  verify->add_option("--points", vopts.points, "Points per equator")->check(CLI::PositiveNumber);
  verify->add_option("--circles", vopts.circles, "Great circles in the Killing check")
      ->check(CLI::PositiveNumber);
  for (const auto& [name, tol] : eqf::default_tolerances()) {
    std::string flag = "--tol-" + name;
    for (char& ch : flag) {
      if (ch == '_') ch = '-';
    }
    verify->add_option(flag, tol_flags[name], "Tolerance of the " + name + " check")
        ->default_val(tol)
        ->check(CLI::NonNegativeNumber);
  }
  verify->add_option("--out", verify_common.out, "Report file (default stdout)");

  // area
  auto* area = app.add_subcommand("area", "Areas of seeded random equators as CSV");
  std::string area_input;
  int area_equators = 100;
  int area_order = 32;
  Common area_common;
  area->add_option("input", area_input, "Tensor or metric fixture JSON")->required();
  area->add_option("--equators", area_equators, "Number of equators")->check(CLI::PositiveNumber);
  area->add_option("--order", area_order, "Quadrature order")->check(CLI::Range(2, 4096));
  area->add_option("--seed", area_common.seed, "Seed");
  area->add_option("--out", area_common.out, "Output file (default stdout)");

  // radon
  auto* radon = app.add_subcommand("radon", "Funk-Radon transform over seeded random equators");
  std::string radon_input;
  std::string radon_function = "1";
  int radon_equators = 100;
  int radon_order = 32;
  Common radon_common;
  radon->add_option("input", radon_input, "Tensor or metric fixture JSON")->required();
  radon->add_option("--function", radon_function,
                    "Monomial in ambient coordinates, e.g. 1, x0^2, 3*x1*x2");
  radon->add_option("--equators", radon_equators, "Number of equators")->check(CLI::PositiveNumber);
  radon->add_option("--order", radon_order, "Quadrature order")->check(CLI::Range(2, 4096));
  radon->add_option("--seed", radon_common.seed, "Seed");
  radon->add_option("--out", radon_common.out, "Output file (default stdout)");

  // spectrum
  auto* spectrum = app.add_subcommand("spectrum", "Galerkin Jacobi spectrum of an equator (n = 3)");
  std::string spectrum_input;
  std::vector<int> spectrum_degrees{8};
  std::string spectrum_normal = "0,0,0,1";
  int spectrum_order = 0;
  Common spectrum_common;
  spectrum->add_option("input", spectrum_input, "Tensor or metric fixture JSON")->required();
  spectrum->add_option("--L", spectrum_degrees, "Max harmonic degree; several values give a convergence table")
      ->check(CLI::Range(0, 64));
  spectrum->add_option("--normal", spectrum_normal, "Equator normal, comma separated");
  spectrum->add_option("--order", spectrum_order, "Quadrature order (0: automatic)")
      ->check(CLI::Range(0, 4096));
  spectrum->add_option("--out", spectrum_common.out, "Output file (default stdout)");

  // act
  auto* act = app.add_subcommand("act", "Apply a group element to a tensor");
  std::string act_input, act_matrix;
  Common act_common;
  act->add_option("input", act_input, "Tensor JSON")->required();
  act->add_option("matrix", act_matrix, "JSON array of rows")->required();
  act->add_option("--out", act_common.out, "Output file (default stdout)");

  // quadrature
  auto* quad = app.add_subcommand("quadrature", "Export a quadrature rule as CSV");
  int quad_n = 3;
  int quad_order = 8;
  std::string quad_equator;
  Common quad_common;
  quad->add_option("--n", quad_n, "Sphere dimension")->check(CLI::Range(2, 12));
  quad->add_option("--order", quad_order, "Quadrature order")->check(CLI::Range(1, 4096));
  quad->add_option("--equator", quad_equator, "Rule on the equator with this normal instead of S^n");
  quad->add_option("--seed", quad_common.seed, "Seed (Monte Carlo rules)");
  quad->add_option("--out", quad_common.out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (*gen) {
      std::string construction = gen_kind;
      std::optional<eqf::CurvatureTensor> r;
      if (gen_kind == "round") {
        r = eqf::constant_curvature(gen_n, 1.0);
      } else if (gen_kind == "fubini-study") {
        r = eqf::fubini_study(gen_m);
        construction += " m=" + std::to_string(gen_m);
      } else if (gen_kind == "left-invariant") {
        if (!(gen_a > 0 && gen_b > 0 && gen_c > 0)) throw UsageError("--a, --b, --c must be positive");
        r = *eqf::left_invariant_metric(gen_a, gen_b, gen_c).generator();
        std::ostringstream tag;
        tag.precision(17);
        tag << " a=" << gen_a << " b=" << gen_b << " c=" << gen_c;
        construction += tag.str();
      } else {
        if (!(gen_eps > 0 && gen_eps <= 2)) throw UsageError("--eps must lie in (0, 2]");
        const auto rt = eqf::random_positive(gen_n, gen_common.seed, gen_eps);
        std::cerr << "positivity margin " << rt.margin << " (eps " << rt.eps << ")\n";
        r = rt.tensor;
        construction += " seed=" + std::to_string(gen_common.seed);
      }
      emit(gen_common.out, eqf::tensor_to_json(*r, construction));
      return kExitPass;
    }

    if (*verify) {
      vopts.seed = verify_common.seed;
      vopts.tolerances = tol_flags;
      const std::string text = eqf::read_file(verify_input);
      eqf::VerificationReport report;
      if (text.find(eqf::kMetricFixtureFormat) != std::string::npos) {
        report = eqf::verify_metric(eqf::metric_from_json(text), vopts);
      } else {
        report = eqf::verify_tensor(eqf::tensor_from_json(text), vopts);
      }
      emit(verify_common.out, report.to_json());
      return report.pass() ? kExitPass : kExitFail;
    }

    if (*area) {
      const auto g = eqf::metric_from_json(eqf::read_file(area_input));
      const auto equators = random_equators(g.n(), area_equators, area_common.seed);
      std::vector<double> values(equators.size());
      for (std::size_t i = 0; i < equators.size(); ++i) {
        values[i] = eqf::equator_area(g, equators[i], area_order, area_common.seed).value;
      }
      emit(area_common.out, eqf::area_csv(equators, values));
      return kExitPass;
    }

    if (*radon) {
      const auto g = eqf::metric_from_json(eqf::read_file(radon_input));
      const auto f = parse_monomial(radon_function, g.n() + 1);
      const auto equators = random_equators(g.n(), radon_equators, radon_common.seed);
      std::vector<double> values(equators.size());
      for (std::size_t i = 0; i < equators.size(); ++i) {
        values[i] = eqf::funk_radon(g, f, equators[i], radon_order, radon_common.seed).value;
      }
      emit(radon_common.out, radon_csv(equators, values));
      return kExitPass;
    }

    if (*spectrum) {
      const auto g = eqf::metric_from_json(eqf::read_file(spectrum_input));
      if (g.n() != 3) throw UsageError("spectrum requires n = 3");
      const Vec normal = parse_vector(spectrum_normal);
      if (normal.size() != 4) throw UsageError("--normal needs 4 entries");
      const eqf::Equator v(normal);
      if (spectrum_degrees.size() == 1) {
        const eqf::JacobiGalerkin jg(g, v, spectrum_degrees.front(), spectrum_order);
        emit(spectrum_common.out, eqf::spectrum_csv(jg.eigenvalues()));
        return kExitPass;
      }
      std::ostringstream out;
      out.precision(17);
      out << "L,k,eigenvalue\n";
      for (int l : spectrum_degrees) {
        const Vec ev = eqf::JacobiGalerkin(g, v, l, spectrum_order).eigenvalues();
        for (Eigen::Index k = 0; k < ev.size(); ++k) out << l << ',' << k << ',' << ev(k) << '\n';
      }
      emit(spectrum_common.out, out.str());
      return kExitPass;
    }

    if (*act) {
      const auto r = eqf::tensor_from_json(eqf::read_file(act_input));
      const Mat m = eqf::matrix_from_json(eqf::read_file(act_matrix));
      if (m.rows() != r.dim()) throw UsageError("matrix size does not match the tensor");
      const eqf::GroupElement t(m);
      emit(act_common.out, eqf::tensor_to_json(eqf::act(r, t), "act"));
      return kExitPass;
    }

    if (*quad) {
      if (quad_equator.empty()) {
        emit(quad_common.out, eqf::quadrature_csv(eqf::sphere_quadrature(quad_n, quad_order, quad_common.seed)));
      } else {
        const Vec normal = parse_vector(quad_equator);
        emit(quad_common.out,
             eqf::quadrature_csv(eqf::equator_quadrature(eqf::Equator(normal), quad_order, quad_common.seed)));
      }
      return kExitPass;
    }
  } catch (const std::exception& e) {
    // Bad input of any kind: unreadable files, failed validation, bad parameters.
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
