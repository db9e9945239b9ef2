#include <iostream>

#include "ringcover/cli.hpp"

int main(int argc, char** argv) { return ringcover::cli_main(argc, argv, std::cout, std::cerr); }
