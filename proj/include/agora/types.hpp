#pragma once

namespace agora {

using AgentId = int;
using StockId = int;
using Quantity = long;

}  // namespace agora
