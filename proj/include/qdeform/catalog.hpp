#pragma once

#include "qdeform/algebra.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace qdeform::catalog
{

// Built-in deformations and their closed-form structure functions:
//
//   harmonic         F = 1, G = 1              f(n) = n
//   arik-coon(q)     F = q, G = 1              f(n) = (1 - q^n) / (1 - q)
//   biedenharn(q)    F = q, G = q^(-n)         f(n) = (q^n - q^-n) / (q - q^-1)
//   pq(p, q)         F = q, G = p^(-n)         f(n) = |(q^n - p^-n) / (q - p^-1)|
//
// Defaults: arik-coon q = 0.5, biedenharn q = 2, pq p = 2, q = 1.5.

struct Entry
{
    std::string name;
    std::string F;
    std::string G;
    Bindings defaults;
};

const std::vector<Entry>& entries();
std::vector<std::string> names();

/// Builtin spec with the given parameter overrides; unknown names or
/// unknown parameters raise ConfigError.
DeformationSpec builtin(std::string_view name, const Bindings& overrides = {});

} // namespace qdeform::catalog
