/* Copyright 2026 The AxialFold Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "axial/evoformer.h"

#include <cmath>
#include <random>

#include "axial/errors.h"
#include "axial/evoformer_program.h"

namespace axial {
namespace {

void expect_shape(const Tensor& t, const Shape& want, const char* what) {
  if (!t.defined() || t.shape() != want) {
    throw DimensionError(std::string(what) + " has shape " +
                         (t.defined() ? to_string(t.shape()) : "<undefined>") +
                         ", config expects " + to_string(want));
  }
}

Shape msa_shape(const EvoConfig& c) { return {c.n_seq, c.n_res, c.h_msa}; }
Shape pair_shape(const EvoConfig& c) { return {c.n_res, c.n_res, c.h_pair}; }

double draw(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

void EvoConfig::validate() const {
  if (n_seq < 1 || n_res < 1 || h_msa < 1 || h_pair < 1 || n_head_msa < 1 ||
      n_head_pair < 1 || hidden_proj < 1 || transition_factor < 1) {
    throw DimensionError("evoformer dimensions must all be positive");
  }
  if (h_msa % n_head_msa != 0) {
    throw DimensionError("h_msa " + std::to_string(h_msa) +
                         " not divisible by n_head_msa " + std::to_string(n_head_msa));
  }
  if (h_pair % n_head_pair != 0) {
    throw DimensionError("h_pair " + std::to_string(h_pair) +
                         " not divisible by n_head_pair " + std::to_string(n_head_pair));
  }
}

nlohmann::json EvoConfig::to_json() const {
  return {{"n_seq", n_seq},           {"n_res", n_res},
          {"h_msa", h_msa},           {"h_pair", h_pair},
          {"n_head_msa", n_head_msa}, {"n_head_pair", n_head_pair},
          {"hidden_proj", hidden_proj}, {"transition_factor", transition_factor}};
}

EvoConfig EvoConfig::from_json(const nlohmann::json& j) {
  EvoConfig c;
  c.n_seq = j.at("n_seq").get<std::int64_t>();
  c.n_res = j.at("n_res").get<std::int64_t>();
  c.h_msa = j.at("h_msa").get<std::int64_t>();
  c.h_pair = j.at("h_pair").get<std::int64_t>();
  c.n_head_msa = j.at("n_head_msa").get<int>();
  c.n_head_pair = j.at("n_head_pair").get<int>();
  c.hidden_proj = j.at("hidden_proj").get<std::int64_t>();
  c.transition_factor = j.at("transition_factor").get<int>();
  c.validate();
  return c;
}

std::vector<std::pair<std::string, Shape>> parameter_layout(const EvoConfig& c) {
  c.validate();
  std::vector<std::pair<std::string, Shape>> out;
  auto ln = [&](const std::string& name, std::int64_t width) {
    out.push_back({name + ".gamma", {width}});
    out.push_back({name + ".beta", {width}});
  };
  auto lin = [&](const std::string& name, std::int64_t in, std::int64_t width) {
    out.push_back({name + ".w", {in, width}});
    out.push_back({name + ".b", {width}});
  };
  const std::int64_t hm = c.h_msa, hz = c.h_pair, p = c.hidden_proj;

  ln("msa_row.ln_m", hm);
  ln("msa_row.ln_z", hz);
  for (const char* n : {"q", "k", "v"}) lin(std::string("msa_row.") + n, hm, hm);
  lin("msa_row.bias", hz, c.n_head_msa);
  lin("msa_row.gate", hm, hm);
  lin("msa_row.out", hm, hm);

  ln("msa_col.ln_m", hm);
  for (const char* n : {"q", "k", "v", "gate", "out"}) {
    lin(std::string("msa_col.") + n, hm, hm);
  }

  ln("msa_transition.ln", hm);
  lin("msa_transition.fc1", hm, c.transition_factor * hm);
  lin("msa_transition.fc2", c.transition_factor * hm, hm);

  ln("opm.ln", hm);
  lin("opm.a", hm, p);
  lin("opm.b", hm, p);
  lin("opm.out", p * p, hz);

  for (const std::string t : {"tri_out", "tri_in"}) {
    ln(t + ".ln_in", hz);
    lin(t + ".gate", hz, hz);
    for (const char* n : {"a_gate", "a_proj", "b_gate", "b_proj"}) lin(t + "." + n, hz, p);
    ln(t + ".ln_out", p);
    lin(t + ".out", p, hz);
  }

  for (const std::string a : {"pair_row", "pair_col"}) {
    ln(a + ".ln", hz);
    for (const char* n : {"q", "k", "v"}) lin(a + "." + n, hz, hz);
    lin(a + ".bias", hz, c.n_head_pair);
    lin(a + ".gate", hz, hz);
    lin(a + ".out", hz, hz);
  }

  ln("pair_transition.ln", hz);
  lin("pair_transition.fc1", hz, c.transition_factor * hz);
  lin("pair_transition.fc2", c.transition_factor * hz, hz);
  return out;
}

BlockParams BlockParams::random(const EvoConfig& config, std::uint64_t seed) {
  BlockParams p(config);
  std::mt19937_64 rng(seed);
  for (const auto& [name, shape] : parameter_layout(config)) {
    Tensor t = Tensor::zeros(shape);
    auto values = t.mutable_values();
    if (ends_with(name, ".w")) {
      const double s = 1.0 / std::sqrt(static_cast<double>(shape[0]));
      for (double& v : values) v = draw(rng, -s, s);
    } else if (ends_with(name, ".gamma")) {
      for (double& v : values) v = 1.0 + draw(rng, -0.1, 0.1);
    } else {
      for (double& v : values) v = draw(rng, -0.1, 0.1);
    }
    p.params_[name] = std::move(t);
  }
  return p;
}

BlockParams BlockParams::zeros_like() const {
  BlockParams p(config_);
  for (const auto& [name, t] : params_) p.params_[name] = Tensor::zeros(t.shape());
  return p;
}

const Tensor& BlockParams::at(const std::string& name) const {
  const auto it = params_.find(name);
  if (it == params_.end()) throw DimensionError("unknown parameter '" + name + "'");
  return it->second;
}

void BlockParams::set(const std::string& name, Tensor value) {
  const auto it = params_.find(name);
  if (it != params_.end() && it->second.shape() != value.shape()) {
    throw DimensionError("parameter '" + name + "' has shape " +
                         to_string(it->second.shape()) + ", got " +
                         to_string(value.shape()));
  }
  params_[name] = std::move(value);
}

nlohmann::json BlockParams::to_json() const {
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [name, t] : params_) {
    params[name] = {{"shape", t.shape()}, {"data", t.to_vector()}};
  }
  return {{"schema", "axialfold.params/1"},
          {"config", config_.to_json()},
          {"params", params}};
}

BlockParams BlockParams::from_json(const nlohmann::json& j) {
  BlockParams p(EvoConfig::from_json(j.at("config")));
  for (const auto& [name, entry] : j.at("params").items()) {
    p.params_[name] = Tensor::from_vector(entry.at("shape").get<Shape>(),
                                          entry.at("data").get<std::vector<double>>());
  }
  for (const auto& [name, shape] : parameter_layout(p.config_)) {
    if (!p.contains(name) || p.at(name).shape() != shape) {
      throw DimensionError("parameter dump missing or misshaped '" + name + "'");
    }
  }
  return p;
}

Tensor msa_row_attention(const Tensor& m, const Tensor& z, const BlockParams& p) {
  expect_shape(m, msa_shape(p.config()), "msa");
  expect_shape(z, pair_shape(p.config()), "pair");
  EagerOps ops(p);
  EvoformerProgram<EagerOps> prog(ops, p.config());
  return prog.msa_row_attention(m, prog.msa_pair_bias(z));
}

Tensor msa_col_attention(const Tensor& m, const BlockParams& p) {
  expect_shape(m, msa_shape(p.config()), "msa");
  EagerOps ops(p);
  return EvoformerProgram<EagerOps>(ops, p.config()).msa_col_attention(m);
}

Tensor transition(const Tensor& x, const BlockParams& p, Stack stack) {
  expect_shape(x, stack == Stack::kMsa ? msa_shape(p.config()) : pair_shape(p.config()),
               stack == Stack::kMsa ? "msa" : "pair");
  EagerOps ops(p);
  return EvoformerProgram<EagerOps>(ops, p.config()).transition(x, stack);
}

Tensor outer_product_mean(const Tensor& m, const BlockParams& p) {
  expect_shape(m, msa_shape(p.config()), "msa");
  EagerOps ops(p);
  EvoformerProgram<EagerOps> prog(ops, p.config());
  const auto pr = prog.opm_projections(m);
  return prog.opm_combine(pr.a, pr.b);
}

Tensor tri_update_outgoing(const Tensor& z, const BlockParams& p) {
  expect_shape(z, pair_shape(p.config()), "pair");
  EagerOps ops(p);
  EvoformerProgram<EagerOps> prog(ops, p.config());
  return prog.tri_outgoing_combine(prog.tri_projections(z, "tri_out"));
}

Tensor tri_update_incoming(const Tensor& z, const BlockParams& p) {
  expect_shape(z, pair_shape(p.config()), "pair");
  EagerOps ops(p);
  EvoformerProgram<EagerOps> prog(ops, p.config());
  return prog.tri_incoming_combine(prog.tri_projections(z, "tri_in"));
}

Tensor pair_attention_row(const Tensor& z, const BlockParams& p) {
  expect_shape(z, pair_shape(p.config()), "pair");
  EagerOps ops(p);
  return EvoformerProgram<EagerOps>(ops, p.config()).pair_attention_row(z);
}

Tensor pair_attention_col(const Tensor& z, const BlockParams& p) {
  expect_shape(z, pair_shape(p.config()), "pair");
  EagerOps ops(p);
  return EvoformerProgram<EagerOps>(ops, p.config()).pair_attention_col(z);
}

BlockOutput evoformer_block(const Tensor& m, const Tensor& z, const BlockParams& p) {
  expect_shape(m, msa_shape(p.config()), "msa");
  expect_shape(z, pair_shape(p.config()), "pair");
  EagerOps ops(p);
  auto [m_out, z_out] = EvoformerProgram<EagerOps>(ops, p.config()).block(m, z);
  return {m_out, z_out};
}

}  // namespace axial
