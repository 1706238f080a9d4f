#include "rik/serialization.hpp"

#include <cstdio>

#include "json.hpp"

namespace rik {

namespace {

using nlohmann::json;

json step_to_json(const StepFunction& x) {
  json j;
  j["alpha"] = x.space().finite() ? "1" : "inf";
  j["breakpoints"] = std::vector<double>(x.breakpoints().begin(),
                                         x.breakpoints().end());
  j["values"] = std::vector<double>(x.values().begin(), x.values().end());
  j["tail"] = x.tail();
  if (x.sup_only()) j["sup_only"] = true;
  return j;
}

StepFunction step_from_json(const json& j) {
  const std::string alpha = j.at("alpha").get<std::string>();
  if (alpha != "1" && alpha != "inf")
    throw std::invalid_argument("StepFunction json: alpha must be 1 or inf");
  const MeasureSpace space = alpha == "1" ? unit_space : halfline_space;
  return StepFunction::from_breakpoints(
      space, j.at("breakpoints").get<std::vector<double>>(),
      j.at("values").get<std::vector<double>>(),
      j.value("tail", 0.0), j.value("sup_only", false));
}

json phi_to_json(const QuasiconcavePhi& phi) {
  json j;
  if (phi.is_power()) {
    j["form"] = "power";
    j["a"] = phi.exponent();
  } else {
    j["form"] = "table";
    j["t"] = std::vector<double>(phi.table_abscissae().begin(),
                                 phi.table_abscissae().end());
    j["v"] = std::vector<double>(phi.table_values().begin(),
                                 phi.table_values().end());
  }
  return j;
}

QuasiconcavePhi phi_from_json(const json& j) {
  const std::string form = j.at("form").get<std::string>();
  if (form == "power") return QuasiconcavePhi::power(j.at("a").get<double>());
  if (form == "table")
    return QuasiconcavePhi::table(j.at("t").get<std::vector<double>>(),
                                  j.at("v").get<std::vector<double>>());
  throw std::invalid_argument("phi json: unknown form");
}

json norm_to_json(const NormSpec& spec) {
  json j;
  switch (spec.variant) {
    case NormVariant::L1: j["variant"] = "L1"; break;
    case NormVariant::LInf: j["variant"] = "LInf"; break;
    case NormVariant::L1PlusLInf: j["variant"] = "L1+LInf"; break;
    case NormVariant::Lp:
      j["variant"] = "Lp";
      j["p"] = spec.p;
      break;
    case NormVariant::MarcinkiewiczStar:
      j["variant"] = "Mstar";
      j["phi"] = phi_to_json(*spec.phi);
      break;
    case NormVariant::Marcinkiewicz:
      j["variant"] = "M";
      j["phi"] = phi_to_json(*spec.phi);
      break;
  }
  return j;
}

NormSpec norm_from_json(const json& j) {
  const std::string v = j.at("variant").get<std::string>();
  if (v == "L1") return NormSpec::l1();
  if (v == "LInf") return NormSpec::linf();
  if (v == "L1+LInf") return NormSpec::l1_plus_linf();
  if (v == "Lp") return NormSpec::lp(j.at("p").get<double>());
  if (v == "Mstar")
    return NormSpec::marcinkiewicz_star(phi_from_json(j.at("phi")));
  if (v == "M") return NormSpec::marcinkiewicz(phi_from_json(j.at("phi")));
  throw std::invalid_argument("NormSpec json: unknown variant");
}

json matrix_to_json(const TransferMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.size(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return {{"n", m.size()},
          {"rows", std::move(rows)},
          {"kind", m.kind() == MatrixKind::doubly_stochastic ? "ds" : "dss"}};
}

TransferMatrix matrix_from_json(const json& j) {
  const auto n = j.at("n").get<std::size_t>();
  const std::string kind = j.at("kind").get<std::string>();
  if (kind != "ds" && kind != "dss")
    throw std::invalid_argument("TransferMatrix json: kind must be ds or dss");
  TransferMatrix m(n, kind == "ds" ? MatrixKind::doubly_stochastic
                                   : MatrixKind::doubly_substochastic);
  const auto& rows = j.at("rows");
  if (rows.size() != n)
    throw std::invalid_argument("TransferMatrix json: row count mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = rows[i];
    if (row.size() != n)
      throw std::invalid_argument("TransferMatrix json: column count mismatch");
    for (std::size_t k = 0; k < n; ++k) m.at(i, k) = row[k].get<double>();
  }
  return m;
}

json cells_to_json(std::span<const Interval> cells) {
  json arr = json::array();
  for (const Interval& c : cells) arr.push_back(json::array({c.lo, c.hi}));
  return arr;
}

std::vector<Interval> cells_from_json(const json& arr) {
  std::vector<Interval> cells;
  for (const auto& c : arr)
    cells.push_back({c.at(0).get<double>(), c.at(1).get<double>()});
  return cells;
}

MeasureSpace space_from_json(const json& j) {
  return j.value("alpha", std::string("1")) == "1" ? unit_space
                                                   : halfline_space;
}

json op_to_json(const OperatorExpr& op);

json grid_to_json(const Grid& g) {
  return {{"cells", g.cells}, {"width", g.width}};
}

Grid grid_from_json(const json& j) {
  return {j.at("cells").get<int>(), j.at("width").get<double>()};
}

struct OpJsonVisitor {
  json operator()(const OperatorExpr::Identity&) {
    return {{"node", "identity"}};
  }
  json operator()(const OperatorExpr::PartitionAverage& pa) {
    return {{"node", "partition_average"},
            {"alpha", pa.family.space().finite() ? "1" : "inf"},
            {"cells", cells_to_json(pa.family.cells())},
            {"keep_residual", pa.keep_residual}};
  }
  json operator()(const OperatorExpr::FamilyCombine& fc) {
    json inner = json::array();
    for (const auto& op : fc.inner) inner.push_back(op_to_json(op));
    return {{"node", "family_combine"},
            {"alpha", fc.family.space().finite() ? "1" : "inf"},
            {"cells", cells_to_json(fc.family.cells())},
            {"inner", std::move(inner)}};
  }
  json operator()(const OperatorExpr::MeasurePreserve& mp) {
    return {{"node", "measure_preserve"},
            {"lo", mp.lo},
            {"block_width", mp.block_width},
            {"perm", mp.perm}};
  }
  json operator()(const OperatorExpr::DiscreteMatrix& dm) {
    return {{"node", "discrete_matrix"},
            {"matrix", matrix_to_json(dm.matrix)},
            {"grid", grid_to_json(dm.grid)}};
  }
  json operator()(const OperatorExpr::CellPermutation& cp) {
    return {{"node", "permutation"},
            {"perm", cp.perm},
            {"grid", grid_to_json(cp.grid)}};
  }
  json operator()(const OperatorExpr::CirculantKernel& ck) {
    return {{"node", "circulant"},
            {"weights", ck.weights},
            {"grid", grid_to_json(ck.grid)}};
  }
  json operator()(const OperatorExpr::ConvexCombine& cc) {
    json children = json::array();
    for (const auto& op : cc.children) children.push_back(op_to_json(op));
    return {{"node", "convex"},
            {"weights", cc.weights},
            {"children", std::move(children)}};
  }
  json operator()(const OperatorExpr::Compose& co) {
    json children = json::array();
    for (const auto& op : co.children) children.push_back(op_to_json(op));
    return {{"node", "compose"}, {"children", std::move(children)}};
  }
  json operator()(const OperatorExpr::FiniteRankTruncate& fr) {
    return {{"node", "finite_rank"},
            {"alpha", fr.family.space().finite() ? "1" : "inf"},
            {"cells", cells_to_json(fr.family.cells())},
            {"keep_residual", fr.keep_residual},
            {"horizon", fr.horizon},
            {"rank", fr.rank}};
  }
};

json op_to_json(const OperatorExpr& op) {
  return std::visit(OpJsonVisitor{}, op.node());
}

OperatorExpr op_from_json(const json& j) {
  const std::string node = j.at("node").get<std::string>();
  if (node == "identity") return OperatorExpr::identity();
  if (node == "partition_average")
    return OperatorExpr::partition_average(
        PartitionFamily(space_from_json(j), cells_from_json(j.at("cells"))),
        j.value("keep_residual", true));
  if (node == "family_combine") {
    std::vector<OperatorExpr> inner;
    for (const auto& c : j.at("inner")) inner.push_back(op_from_json(c));
    return OperatorExpr::family_combine(
        PartitionFamily(space_from_json(j), cells_from_json(j.at("cells"))),
        std::move(inner));
  }
  if (node == "measure_preserve")
    return OperatorExpr::measure_preserve(
        j.at("lo").get<double>(), j.at("block_width").get<double>(),
        j.at("perm").get<std::vector<int>>());
  if (node == "discrete_matrix")
    return OperatorExpr::discrete_matrix(matrix_from_json(j.at("matrix")),
                                         grid_from_json(j.at("grid")));
  if (node == "permutation")
    return OperatorExpr::cell_permutation(j.at("perm").get<std::vector<int>>(),
                                          grid_from_json(j.at("grid")));
  if (node == "circulant")
    return OperatorExpr::circulant(j.at("weights").get<std::vector<double>>(),
                                   grid_from_json(j.at("grid")));
  if (node == "convex") {
    std::vector<OperatorExpr> children;
    for (const auto& c : j.at("children")) children.push_back(op_from_json(c));
    return OperatorExpr::convex_combine(
        std::move(children), j.at("weights").get<std::vector<double>>());
  }
  if (node == "compose") {
    std::vector<OperatorExpr> children;
    for (const auto& c : j.at("children")) children.push_back(op_from_json(c));
    return OperatorExpr::compose(std::move(children));
  }
  if (node == "finite_rank") {
    PartitionFamily fam(space_from_json(j), cells_from_json(j.at("cells")));
    const auto base = OperatorExpr::partition_average(
        fam, j.value("keep_residual", true));
    return OperatorExpr::finite_rank_truncate(base,
                                              j.at("horizon").get<double>(),
                                              j.at("rank").get<int>());
  }
  throw std::invalid_argument("OperatorExpr json: unknown node kind: " + node);
}

}  // namespace

std::string to_json(const StepFunction& x) { return step_to_json(x).dump(); }

StepFunction step_function_from_json(const std::string& text) {
  return step_from_json(json::parse(text));
}

std::string to_json(const NormSpec& spec) { return norm_to_json(spec).dump(); }

NormSpec norm_spec_from_json(const std::string& text) {
  return norm_from_json(json::parse(text));
}

std::string to_json(const TransferMatrix& m) { return matrix_to_json(m).dump(); }

TransferMatrix transfer_matrix_from_json(const std::string& text) {
  return matrix_from_json(json::parse(text));
}

std::string to_json(const MajorizationCertificate& cert) {
  json j;
  j["holds"] = cert.holds;
  if (cert.witness_t) j["witness_t"] = *cert.witness_t;
  j["margin"] = cert.margin;
  return j.dump();
}

std::string to_json(const OperatorExpr& op) { return op_to_json(op).dump(); }

OperatorExpr operator_expr_from_json(const std::string& text) {
  return op_from_json(json::parse(text));
}

std::string to_json(const SubstochasticCertificate& cert) {
  json j;
  j["ok"] = cert.ok;
  j["probes"] = cert.probes_checked;
  j["tol"] = cert.tol;
  j["worst_margin"] = cert.worst_margin;
  json fails = json::array();
  for (const auto& f : cert.failures) {
    json e;
    e["probe"] = f.probe_index;
    e["check"] = f.check;
    e["margin"] = f.margin;
    if (f.witness_t) e["witness_t"] = *f.witness_t;
    fails.push_back(std::move(e));
  }
  j["failures"] = std::move(fails);
  return j.dump();
}

std::string to_json(const OperatorNormEstimate& est) {
  json j;
  j["value"] = est.value;
  j["probes"] = est.probe_count;
  j["witness_id"] = est.witness;
  j["bound_kind"] = OperatorNormEstimate::bound_kind;
  return j.dump();
}

std::string kprofile_csv(const KProfile& profile) {
  std::string out = "t,K\n";
  const auto& P = profile.profile();
  auto ts = P.node_abscissae();
  auto Fs = P.node_values();
  char buf[64];
  for (std::size_t i = 0; i < ts.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", ts[i], Fs[i]);
    out += buf;
  }
  return out;
}

}  // namespace rik
