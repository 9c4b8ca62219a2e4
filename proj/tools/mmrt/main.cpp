// SPDX-License-Identifier: Apache-2.0

#include "campaign.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return mmrt::cli::run(argc, argv, std::cout, std::cerr);
}
