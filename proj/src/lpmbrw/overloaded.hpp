#ifndef LPMBRW_OVERLOADED_HPP
#define LPMBRW_OVERLOADED_HPP

namespace lpmbrw {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace lpmbrw

#endif  // LPMBRW_OVERLOADED_HPP
