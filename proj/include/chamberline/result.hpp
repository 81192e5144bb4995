#pragma once

#include <stdexcept>
#include <utility>
#include <variant>

namespace chamberline {

/// Wraps an error value so it can be returned from a function yielding Result.
template <typename E>
struct Err {
  E error;
};

template <typename E>
Err(E) -> Err<E>;

/// Value-or-error return type (std::expected is C++23).
template <typename T, typename E>
class Result {
 public:
  Result(T value) : data_(std::in_place_index<0>, std::move(value)) {}
  Result(Err<E> err) : data_(std::in_place_index<1>, std::move(err.error)) {}

  [[nodiscard]] bool has_value() const noexcept { return data_.index() == 0; }
  explicit operator bool() const noexcept { return has_value(); }

  [[nodiscard]] const T& value() const& {
    if (!has_value()) throw std::logic_error("Result: value() on error");
    return std::get<0>(data_);
  }
  [[nodiscard]] T& value() & {
    if (!has_value()) throw std::logic_error("Result: value() on error");
    return std::get<0>(data_);
  }
  [[nodiscard]] T&& value() && {
    if (!has_value()) throw std::logic_error("Result: value() on error");
    return std::get<0>(std::move(data_));
  }

  [[nodiscard]] const E& error() const& {
    if (has_value()) throw std::logic_error("Result: error() on value");
    return std::get<1>(data_);
  }

  const T& operator*() const& { return value(); }
  T& operator*() & { return value(); }
  const T* operator->() const { return &value(); }
  T* operator->() { return &value(); }

  bool operator==(const Result&) const = default;

 private:
  std::variant<T, E> data_;
};

}  // namespace chamberline
