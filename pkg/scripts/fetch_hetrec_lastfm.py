#!/usr/bin/env python3
"""Download the public hetrec2011-lastfm-2k dataset into data/.

Usage:
    python3 scripts/fetch_hetrec_lastfm.py [destination-dir]

The archive (~2.5 MB) comes from the GroupLens mirror.  After fetching, the
optional Last.fm evaluation test picks the data up automatically from
data/hetrec2011-lastfm-2k/.
"""

import io
import sys
import urllib.request
import zipfile
from pathlib import Path

URL = "https://files.grouplens.org/datasets/hetrec2011/hetrec2011-lastfm-2k.zip"


def main() -> int:
    dest = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("data")
    target = dest / "hetrec2011-lastfm-2k"
    if (target / "user_artists.dat").exists():
        print(f"already present: {target}")
        return 0
    print(f"downloading {URL} ...")
    with urllib.request.urlopen(URL, timeout=120) as response:
        payload = response.read()
    target.mkdir(parents=True, exist_ok=True)
    with zipfile.ZipFile(io.BytesIO(payload)) as archive:
        archive.extractall(target)
    print(f"extracted into {target}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
