import sys

from werewolf_sim.cli import main

sys.exit(main())
