#pragma once

namespace shiftsig::detail {

__extension__ typedef unsigned __int128 uint128;

}  // namespace shiftsig::detail
