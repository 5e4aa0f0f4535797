#pragma once

#include <string>
#include <type_traits>

#include "dsec/field.hpp"

struct FieldName {
  template <class K>
  static std::string GetName(int) {
    return std::is_same_v<K, dsec::Fp> ? "Fp" : "Q";
  }
};
