#pragma once

namespace hoplab {}
