#pragma once

#include <stdexcept>
#include <string>

namespace intentlang {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent world document. `where` is a JSON pointer into
/// the document (e.g. "/adjacency/2/2").
class WorldLoadError : public Error {
public:
  WorldLoadError(std::string where, const std::string& what)
      : Error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const noexcept { return where_; }

private:
  std::string where_;
};

/// A partial semantic function was applied outside its domain. Always an
/// engine bug surface, never a game-level failure.
class UndefinedApplication : public Error {
public:
  using Error::Error;
};

/// An intent or proposition mentions a name the world never declared.
class UndeclaredIdentifier : public Error {
public:
  explicit UndeclaredIdentifier(std::string name)
      : Error("undeclared identifier '" + name + "'"), name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

private:
  std::string name_;
};

} // namespace intentlang
