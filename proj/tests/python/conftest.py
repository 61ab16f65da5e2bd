import os
import sys

package_dir = os.environ.get("RBSB_PACKAGE_DIR")
if package_dir and package_dir not in sys.path:
    sys.path.insert(0, package_dir)
