#include "graspmix/cli.hpp"

int main(int argc, char** argv) { return graspmix::cli::run(argc, argv); }
