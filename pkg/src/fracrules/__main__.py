import sys

from fracrules.cli import main

sys.exit(main())
