// SPDX-License-Identifier: Apache-2.0
//
// irscovert: covert beamforming for IRS-assisted MISO links
// Copyright (C) 2026 The irscovert authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef IRSCOVERT_CHANNEL_IO_HPP
#define IRSCOVERT_CHANNEL_IO_HPP

// JSON form of complex data: a complex number is [re, im], vectors are arrays
// of those and matrices are arrays of rows.

#include <fstream>
#include <string>

#include <json.hpp>

#include "irscovert/channel.hpp"

namespace irscovert {

using Json = nlohmann::json;

inline Json complex_to_json(const Complex& z) { return Json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) {
    throw ContractViolation("complex value must be a [re, im] pair");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

template <class Derived>
Json vector_to_json(const Eigen::MatrixBase<Derived>& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

inline ComplexVector vector_from_json(const Json& j) {
  if (!j.is_array()) throw ContractViolation("complex vector must be an array");
  ComplexVector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = complex_from_json(j[i]);
  return v;
}

inline Json matrix_to_json(const ComplexMatrix& m) {
  Json out = Json::array();
  for (Index i = 0; i < m.rows(); ++i) out.push_back(vector_to_json(m.row(i)));
  return out;
}

inline ComplexMatrix matrix_from_json(const Json& j, Index cols_if_empty = 0) {
  if (!j.is_array()) throw ContractViolation("complex matrix must be an array of rows");
  const Index rows = static_cast<Index>(j.size());
  const Index cols = rows > 0 ? static_cast<Index>(j[0].size()) : cols_if_empty;
  ComplexMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (static_cast<Index>(row.size()) != cols) throw DimensionError("ragged complex matrix");
    for (Index k = 0; k < cols; ++k) m(i, k) = complex_from_json(row[static_cast<std::size_t>(k)]);
  }
  return m;
}

inline Json channel_to_json(const ChannelSet& ch) {
  return Json{{"n_tx", ch.n_tx()},
              {"n_irs", ch.n_irs()},
              {"h_ab", vector_to_json(ch.h_ab)},
              {"h_aw", vector_to_json(ch.h_aw)},
              {"h_ib", vector_to_json(ch.h_ib)},
              {"h_iw", vector_to_json(ch.h_iw)},
              {"h_ai", matrix_to_json(ch.h_ai)}};
}

inline ChannelSet channel_from_json(const Json& j) {
  ChannelSet ch;
  ch.h_ab = vector_from_json(j.at("h_ab"));
  ch.h_aw = vector_from_json(j.at("h_aw"));
  ch.h_ib = vector_from_json(j.at("h_ib"));
  ch.h_iw = vector_from_json(j.at("h_iw"));
  ch.h_ai = matrix_from_json(j.at("h_ai"), ch.h_ab.size());
  ch.validate();
  return ch;
}

inline void write_channel_file(const ChannelSet& ch, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << channel_to_json(ch).dump(2) << '\n';
}

inline ChannelSet read_channel_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return channel_from_json(Json::parse(is));
}

}  // namespace irscovert

#endif  // IRSCOVERT_CHANNEL_IO_HPP
