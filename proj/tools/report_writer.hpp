#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qestkit/complex_matrix.hpp"

namespace qestkit::tool {

// Insertion-ordered JSON tree. Key order is part of the report contract
// (golden files compare bytes), so no map-based reordering anywhere.
class Json {
 public:
  enum class Kind { null, boolean, number, integer, text, array, object };

  Json() : kind_(Kind::null) {}
  Json(bool b) : kind_(Kind::boolean), bool_(b) {}
  Json(double v) : kind_(Kind::number), num_(v) {}
  Json(long v) : kind_(Kind::integer), int_(v) {}
  Json(const char* s) : kind_(Kind::text), text_(s) {}
  Json(std::string s) : kind_(Kind::text), text_(std::move(s)) {}

  static Json object() { Json j; j.kind_ = Kind::object; return j; }
  static Json array() { Json j; j.kind_ = Kind::array; return j; }

  Json& set(const std::string& key, Json v);  // object append, insertion order
  Json& push(Json v);                         // array append

  bool is_object() const { return kind_ == Kind::object; }
  std::string dump(int indent = 2) const;

 private:
  Kind kind_;
  bool bool_ = false;
  double num_ = 0.0;
  long int_ = 0;
  std::string text_;
  std::vector<Json> items_;
  std::vector<std::pair<std::string, Json>> members_;
  void render(std::string& out, int indent, int depth) const;
};

// %.17g, with the non-finite values JSON lacks spelled as strings
std::string format_double(double v);

Json complex_matrix_json(const ComplexMatrix& m);  // nested [re, im] pairs
Json real_matrix_json(const RealMatrix& m);        // same pair layout, im = 0
Json real_vector_json(const std::vector<double>& v);

// FNV-1a 64-bit over the file bytes, "fnv1a:" + 16 hex digits
std::string file_digest(const std::string& path);

std::string iso8601_utc_now();

}  // namespace qestkit::tool
