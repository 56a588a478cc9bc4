#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace morreylab {

/// Insertion-ordered JSON value with all floating-point numbers printed at 17
/// significant digits, so identical runs produce byte-identical reports.
class Json {
 public:
  enum class Type { null, boolean, number, integer, string, array, object };

  Json() : type_(Type::null) {}
  static Json boolean(bool b);
  static Json number(double v);
  static Json integer(std::int64_t v);
  static Json str(std::string s);
  static Json array();
  static Json object();

  Json& set(const std::string& key, Json v);  // object
  Json& push(Json v);                         // array

  Type type() const { return type_; }
  std::string dump(int indent = 2) const;

 private:
  Type type_;
  bool bool_ = false;
  double num_ = 0.0;
  std::int64_t int_ = 0;
  std::string str_;
  std::vector<Json> arr_;
  std::vector<std::pair<std::string, Json>> obj_;

  void dump_to(std::string& out, int indent, int depth) const;
};

/// %.17g formatting used by both the CSV and JSON emitters.
std::string fmt17(double v);

}  // namespace morreylab
