import sys

from safegcd.cli import main

sys.exit(main())
