// Copyright 2026 The oovc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "oovc/error.hpp"
#include "oovc/harness.hpp"

namespace oovc::harness {

namespace {

std::string where(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line) + ": ";
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

}  // namespace

std::size_t Dataset::label_index(std::string_view label) const {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) return i;
  }
  throw FormatError("unknown label '" + std::string(label) + "'");
}

std::vector<std::size_t> Dataset::label_indices() const {
  std::vector<std::size_t> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(label_index(r.label));
  return out;
}

std::string escape_field(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\\': out += "\\\\"; break;
      default: out += c;
    }
  }
  return out;
}

std::string unescape_field(std::string_view s, std::size_t line) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\') {
      out += s[i];
      continue;
    }
    if (++i == s.size()) {
      throw FormatError("line " + std::to_string(line) + ": dangling backslash");
    }
    switch (s[i]) {
      case 't': out += '\t'; break;
      case 'n': out += '\n'; break;
      case 'r': out += '\r'; break;
      case '\\': out += '\\'; break;
      default:
        throw FormatError("line " + std::to_string(line) + ": unknown escape \\" +
                          std::string(1, s[i]));
    }
  }
  return out;
}

Dataset parse_dataset(std::string_view contents, const std::string& source) {
  Dataset d;
  std::unordered_set<std::string> ids;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < contents.size()) {
    std::size_t end = contents.find('\n', pos);
    if (end == std::string_view::npos) end = contents.size();
    std::string_view line = contents.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    const auto f = split_tabs(line);
    if (f.size() < 3 || f.size() > 4) {
      throw FormatError(where(source, line_no) + "expected 3 or 4 tab-separated fields, found " +
                        std::to_string(f.size()));
    }
    DatasetRecord r;
    try {
      r.id = unescape_field(f[0], line_no);
      r.label = unescape_field(f[1], line_no);
      r.text = unescape_field(f[2], line_no);
    } catch (const FormatError& e) {
      throw FormatError(source + ": " + e.what());
    }
    if (r.id.empty()) throw FormatError(where(source, line_no) + "empty id");
    if (r.label.empty()) throw FormatError(where(source, line_no) + "empty label");
    if (f.size() == 4) {
      std::istringstream in{std::string(f[3])};
      std::string tok;
      while (in >> tok) r.provenance.push_back(tok);
    }
    if (!ids.insert(r.id).second) {
      throw FormatError(where(source, line_no) + "duplicate id '" + r.id + "'");
    }
    if (std::find(d.labels.begin(), d.labels.end(), r.label) == d.labels.end()) {
      d.labels.push_back(r.label);
    }
    d.records.push_back(std::move(r));
  }
  if (d.records.empty()) throw FormatError(source + ": dataset has no records");
  return d;
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot open dataset " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_dataset(ss.str(), path);
}

void write_dataset(std::ostream& out, const Dataset& d) {
  for (const auto& r : d.records) {
    out << escape_field(r.id) << '\t' << escape_field(r.label) << '\t' << escape_field(r.text);
    if (!r.provenance.empty()) {
      out << '\t';
      for (std::size_t i = 0; i < r.provenance.size(); ++i) {
        out << (i ? " " : "") << r.provenance[i];
      }
    }
    out << '\n';
  }
}

void save_dataset(const std::string& path, const Dataset& d) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FileError("cannot write dataset " + path);
  write_dataset(out, d);
  if (!out) throw FileError("failed writing dataset " + path);
}

Dataset to_dataset(const bench::Corpus& corpus, bool test_split) {
  Dataset d;
  const auto& docs = test_split ? corpus.test : corpus.train;
  for (const auto& doc : docs) {
    DatasetRecord r;
    r.id = doc.id;
    r.label = corpus.class_names.at(doc.label);
    r.text = doc.text;
    r.provenance = doc.provenance;
    if (std::find(d.labels.begin(), d.labels.end(), r.label) == d.labels.end()) {
      d.labels.push_back(r.label);
    }
    d.records.push_back(std::move(r));
  }
  return d;
}

}  // namespace oovc::harness
