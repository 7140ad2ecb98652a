#include "covsim/cli_app.hpp"

int main(int argc, char** argv) { return covsim::cliapp::run(argc, argv); }
