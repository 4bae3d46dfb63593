#include "reiflab/cli.hpp"

int main(int argc, char** argv)
{
  return reiflab::cli::run(argc, argv);
}
