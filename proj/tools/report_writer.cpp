#include "report_writer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>

#include "qestkit/error.hpp"

namespace qestkit::tool {

Json& Json::set(const std::string& key, Json v) {
  members_.emplace_back(key, std::move(v));
  return *this;
}

Json& Json::push(Json v) {
  items_.push_back(std::move(v));
  return *this;
}

namespace {

void append_escaped(std::string& out, const std::string& s) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "\"nan\"";
  if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void Json::render(std::string& out, int indent, int depth) const {
  const std::string pad(static_cast<std::size_t>(indent) * (depth + 1), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent) * depth, ' ');
  switch (kind_) {
    case Kind::null: out += "null"; break;
    case Kind::boolean: out += bool_ ? "true" : "false"; break;
    case Kind::number: out += format_double(num_); break;
    case Kind::integer: out += std::to_string(int_); break;
    case Kind::text: append_escaped(out, text_); break;
    case Kind::array: {
      if (items_.empty()) {
        out += "[]";
        break;
      }
      // arrays of scalars stay on one line; nested containers get one per line
      bool flat = true;
      for (const auto& it : items_)
        if (it.kind_ == Kind::array || it.kind_ == Kind::object) flat = false;
      out += '[';
      for (std::size_t i = 0; i < items_.size(); ++i) {
        if (!flat) {
          out += '\n';
          out += pad;
        } else if (i > 0) {
          out += ' ';
        }
        items_[i].render(out, indent, depth + 1);
        if (i + 1 < items_.size()) out += ',';
      }
      if (!flat) {
        out += '\n';
        out += close_pad;
      }
      out += ']';
      break;
    }
    case Kind::object: {
      if (members_.empty()) {
        out += "{}";
        break;
      }
      out += '{';
      for (std::size_t i = 0; i < members_.size(); ++i) {
        out += '\n';
        out += pad;
        append_escaped(out, members_[i].first);
        out += ": ";
        members_[i].second.render(out, indent, depth + 1);
        if (i + 1 < members_.size()) out += ',';
      }
      out += '\n';
      out += close_pad;
      out += '}';
      break;
    }
  }
}

std::string Json::dump(int indent) const {
  std::string out;
  render(out, indent, 0);
  return out;
}

Json complex_matrix_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) {
      Json pair = Json::array();
      pair.push(Json(m(i, j).real()));
      pair.push(Json(m(i, j).imag()));
      row.push(std::move(pair));
    }
    rows.push(std::move(row));
  }
  return rows;
}

Json real_matrix_json(const RealMatrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) {
      Json pair = Json::array();
      pair.push(Json(m(i, j)));
      pair.push(Json(0.0));
      row.push(std::move(pair));
    }
    rows.push(std::move(row));
  }
  return rows;
}

Json real_vector_json(const std::vector<double>& v) {
  Json arr = Json::array();
  for (double x : v) arr.push(Json(x));
  return arr;
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::bad_input, "cannot open file: " + path);
  std::uint64_t h = 1469598103934665603ull;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  char buf[24];
  std::snprintf(buf, sizeof buf, "fnv1a:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string iso8601_utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace qestkit::tool
