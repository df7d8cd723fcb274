#include "volmf/cli.hpp"

int main(int argc, char** argv) { return volmf::cli_dispatch(argc, argv); }
