// SPDX-License-Identifier: Apache-2.0
#include "frictionnet/model_io.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

namespace frictionnet {

namespace {

using nlohmann::ordered_json;

ordered_json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error, path.string() + ": " + e.what());
  }
}

bn::Scale scale_from(const std::string& name) {
  if (name == "nominal") return bn::Scale::nominal;
  if (name == "ordinal") return bn::Scale::ordinal;
  throw Error(ErrorCode::parse_error, "unknown scale '" + name + "'");
}

std::string row_label(const std::vector<bn::Variable>& variables, const bn::Cpt& cpt,
                      std::size_t row) {
  std::vector<const bn::Variable*> parents;
  for (const auto& pname : cpt.parents)
    for (const auto& v : variables)
      if (v.name == pname) parents.push_back(&v);
  if (parents.empty()) return "prior";
  std::vector<std::size_t> idx(parents.size(), 0);
  std::size_t rem = row;
  for (int p = static_cast<int>(parents.size()) - 1; p >= 0; --p) {
    const auto card = static_cast<std::size_t>(parents[static_cast<std::size_t>(p)]->cardinality());
    idx[static_cast<std::size_t>(p)] = rem % card;
    rem /= card;
  }
  std::string label;
  for (std::size_t p = 0; p < parents.size(); ++p) {
    if (!label.empty()) label += ",";
    label += parents[p]->name + "=" + parents[p]->states[idx[p]];
  }
  return label;
}

}  // namespace

Model load_model(const std::filesystem::path& path) {
  const ordered_json doc = read_json(path);
  try {
    ModelConfig config;
    std::vector<roadnet::RenormWarning> warnings;

    const std::string units = doc.value("units", "fraction");
    if (units != "percent" && units != "fraction")
      throw Error(ErrorCode::parse_error, "units must be 'percent' or 'fraction'");
    const double divisor = units == "percent" ? 100.0 : 1.0;
    config.renormalize = doc.value("renormalize", true);

    std::vector<bn::Variable> variables;
    for (const auto& jv : doc.at("variables")) {
      bn::Variable v;
      v.name = jv.at("name").get<std::string>();
      v.states = jv.at("states").get<std::vector<std::string>>();
      v.scale = scale_from(jv.value("scale", "nominal"));
      variables.push_back(std::move(v));
    }

    std::vector<bn::Cpt> cpts;
    for (const auto& jc : doc.at("cpts")) {
      bn::Cpt cpt;
      cpt.child = jc.at("child").get<std::string>();
      cpt.parents = jc.value("parents", std::vector<std::string>{});
      for (const auto& jrow : jc.at("rows")) {
        std::vector<double> row = jrow.get<std::vector<double>>();
        if (divisor != 1.0)
          for (double& v : row) v /= divisor;
        cpt.rows.push_back(std::move(row));
      }
      cpts.push_back(std::move(cpt));
    }

    if (doc.contains("camera_confusion_matrix")) {
      roadnet::CameraConfusionMatrix m;
      const auto& jm = doc.at("camera_confusion_matrix");
      if (jm.size() != 7) throw Error(ErrorCode::parse_error, "camera matrix needs 7 rows");
      for (std::size_t r = 0; r < 7; ++r) {
        const auto row = jm.at(r).get<std::vector<double>>();
        if (row.size() != 7) throw Error(ErrorCode::parse_error, "camera matrix needs 7 columns");
        for (std::size_t c = 0; c < 7; ++c) m.rows[r][c] = row[c];
      }
      m.validate();
      config.camera = m;
      const bool have_camera_cpt = std::any_of(
          cpts.begin(), cpts.end(), [](const bn::Cpt& c) { return c.child == roadnet::node::camera; });
      if (!have_camera_cpt)
        cpts.push_back(bn::Cpt{roadnet::node::camera,
                               {roadnet::node::pavement, roadnet::node::weather},
                               roadnet::camera_cpt_rows(m)});
    }

    if (doc.contains("wetness_thresholds")) {
      const auto& jt = doc.at("wetness_thresholds");
      config.wetness.low = jt.at("low").get<std::uint32_t>();
      config.wetness.high = jt.at("high").get<std::uint32_t>();
      config.wetness.validate();
    }

    std::vector<bn::Cpt> raw_cpts = cpts;
    if (config.renormalize)
      for (auto& cpt : cpts)
        for (std::size_t r = 0; r < cpt.rows.size(); ++r)
          cpt.rows[r] = roadnet::renormalize_cpt_row(cpt.rows[r], cpt.child,
                                                     row_label(variables, cpt, r), &warnings);

    return Model{bn::Network::build(std::move(variables), std::move(cpts)), std::move(config),
                 std::move(warnings), std::move(raw_cpts)};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error, path.string() + ": " + e.what());
  }
}

bn::Network load_network(const std::filesystem::path& path) {
  return std::move(load_model(path).network);
}

void save_model(const Model& model, const std::filesystem::path& path) {
  ordered_json doc;
  doc["units"] = "fraction";
  doc["renormalize"] = model.config.renormalize;

  ordered_json jvars = ordered_json::array();
  const bn::Network& net = model.network;
  for (int i = 0; i < net.size(); ++i) {
    const bn::Variable& v = net.variable(i);
    jvars.push_back({{"name", v.name},
                     {"states", v.states},
                     {"scale", v.scale == bn::Scale::ordinal ? "ordinal" : "nominal"}});
  }
  doc["variables"] = std::move(jvars);

  ordered_json jcpts = ordered_json::array();
  for (int i = 0; i < net.size(); ++i) {
    const bn::Cpt& cpt = net.cpt(i);
    jcpts.push_back({{"child", cpt.child}, {"parents", cpt.parents}, {"rows", cpt.rows}});
  }
  doc["cpts"] = std::move(jcpts);

  if (model.config.camera) {
    ordered_json jm = ordered_json::array();
    for (const auto& row : model.config.camera->rows)
      jm.push_back(std::vector<double>(row.begin(), row.end()));
    doc["camera_confusion_matrix"] = std::move(jm);
  }
  doc["wetness_thresholds"] = {{"low", model.config.wetness.low},
                               {"high", model.config.wetness.high}};

  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
  out << doc.dump(1) << '\n';
  if (!out) throw Error(ErrorCode::io_error, "write failed for " + path.string());
}

}  // namespace frictionnet
