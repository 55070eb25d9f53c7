import sys

from csa_sim.cli import main

sys.exit(main())
