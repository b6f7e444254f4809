import sys

from rgs_repeater.cli import main

sys.exit(main())
