#pragma once

#include "hecke/extension.hpp"
#include "hecke/probe.hpp"
#include "hecke/structure.hpp"
#include "hecke/transfer.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hecke {

/// One problem found while parsing; `line` is 1-based.
struct ConfigError {
  int line = 0;
  std::string message;
};

/**
 * Parsed expression: an atom (`text` holds an identifier, integer, span
 * vector, or generator word; which one is decided by context) or a call
 * head(arg, ...) with `is_call` set and `text` holding the head.
 */
struct Expr {
  int line = 0;
  std::string text;
  std::vector<Expr> args;
  bool is_call = false;
};

enum class DeclKind { group, subgroup, pair, length, hom, extension, transfer };

struct Declaration {
  int line = 0;
  DeclKind kind = DeclKind::group;
  std::string name;
  Expr body;
};

/// One task line: kind plus key=value arguments in file order.
struct TaskDecl {
  int line = 0;
  std::string kind;
  std::vector<std::pair<std::string, std::string>> args;

  const std::string* find(const std::string& key) const {
    for (const auto& [k, v] : args)
      if (k == key) return &v;
    return nullptr;
  }
};

/**
 * Validated experiment: settings plus ordered declarations and tasks.
 * A config that parsed cleanly is reference-closed: every name that a
 * declaration or task mentions was declared earlier with the right kind
 * and on the right underlying group.
 */
struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::size_t budget = 200000;
  int truncation = 600;
  std::vector<Declaration> declarations;
  std::vector<TaskDecl> tasks;
};

/// `config` is engaged exactly when `errors` is empty.
struct ParseResult {
  std::optional<ExperimentConfig> config;
  std::vector<ConfigError> errors;
};

/// Parses and validates the line-oriented grammar, reporting every error
/// it can find together with its line number.
ParseResult parse_config(const std::string& text);

/// A weight together with the group it evaluates on.
struct NamedLength {
  LengthFunction len;
  GroupPtr group;
};

/// Materialized declarations, ready for task execution.
struct Environment {
  std::uint64_t seed = 0;
  std::size_t budget = 200000;
  int truncation = 600;
  std::map<std::string, GroupPtr> groups;
  std::map<std::string, SubgroupPtr> subgroups;
  std::map<std::string, PairPtr> pairs;
  std::map<std::string, NamedLength> lengths;
  std::map<std::string, HomPtr> homs;
  std::map<std::string, ExtensionData> extensions;
  std::map<std::string, TransferContext> transfers;
};

/// Builds every declaration in order. Construction failures (degenerate
/// lattice spans, words over missing generators, infinite closures, ...)
/// throw with the declaration named in the message.
Environment build_environment(const ExperimentConfig& cfg);

/// Generator word: `1` for the identity, or NAME or NAME^INT factors
/// joined by `*`; names come from the group's generator list.
Element parse_element_word(const Group& g, const std::string& text);

/// Comma-separated `word:coefficient` terms with exact rational
/// coefficients (`g0^2:3/2, g1:-1`).
std::vector<std::pair<Element, Rational>> parse_function_terms(const Group& g,
                                                               const std::string& text);

}  // namespace hecke
