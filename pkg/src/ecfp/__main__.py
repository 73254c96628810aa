import sys

from ecfp.harness.cli import main

sys.exit(main())
