#!/usr/bin/env python3
"""Regenerate the frequency-derived word lists under data/.

Requires the `wordfreq` package. The hand-maintained files (pos_lexicon.tsv,
abbreviations.txt) are not touched.

    python3 tools/data/gen_data.py data/
"""

import collections
import hashlib
import pathlib
import re
import sys

import wordfreq

FUNCTION_WORD_CANDIDATES = """
a about above across after afterwards again against ago ah all almost alone
along already also although always am among amongst amount an and another any
anybody anyhow anyone anything anyway anyways anywhere apart are around as
aside at away back be became because become becomes becoming been before
beforehand behind being below beneath beside besides best better between beyond
both brief but by can cannot cant certain certainly clearly come comes could
did different do does doing done down downwards during each eight eighteen
eighty eleven either else elsewhere enough entirely especially etc even ever
every everybody everyone everything everywhere exactly except far few fewer
fifteen fifth fifty first five for former formerly forth forty four fourteen
fourth from further furthermore get gets getting given gives go goes going gone
got gotten had hardly has have having he hence her here hereafter hereby herein
hereupon hers herself him himself his hither how however hundred i ie if
immediately in inasmuch indeed inside insofar instead into inward is it its
itself just kept know knows known last lately later latter latterly least less
lest let like likely little lot lots many may maybe me meanwhile merely might
million mine more moreover most mostly much must my myself namely near nearly
necessary neither never nevertheless new next nine nineteen ninety no nobody
none noone nor normally not nothing now nowhere obviously of off often oh okay
old on once one ones only onto or other others otherwise ought our ours
ourselves out outside over overall own particular particularly past per perhaps
please plus possible presumably probably quite rather really regarding
regardless relatively respectively right round said same second seem seemed
seeming seems seen self selves sensible serious seriously seven seventy several
shall she should since six sixty so some somebody somehow someone something
sometime sometimes somewhat somewhere soon sorry still such sure take taken ten
than thank thanks that the their theirs them themselves then thence there
thereafter thereby therefore therein thereupon these they third thirty this
thorough thoroughly those though thousand three through throughout thru thus
till to together too took toward towards twelve twenty twice two un under
unfortunately unless unlike unlikely until unto up upon us use used useful uses
using usually various very via viz vs want wants was way we well went were what
whatever when whence whenever where whereafter whereas whereby wherein whereupon
wherever whether which while whilst whither who whoever whole whom whomever
whose why will willing wish with within without wonder would yes yet you your
yours yourself yourselves zero
accordingly actually additionally admittedly afterward albeit altogether anew
anytime approximately aught barely billion cause certainty consequently
considering despite doubtless due eighth else's equally erstwhile everyday
everytime evidently exceedingly excluding extremely fairly finally firstly
following forever frequently fully generally greatly hardly henceforth hereto
highly hitherto hopefully ideally including increasingly initially largely
lastly likewise literally mainly maximally mere midst minus moderately
naturally nay ninth nonetheless notwithstanding nowadays occasionally ok onward
onwards partly pending precisely previously primarily prior provided providing
quickly rarely readily recently secondly seldom seventh shortly significantly
similarly simply since sixth slightly specifically strongly subsequently
substantially successfully sufficiently supposedly surely tenth thereabouts
therefrom thirdly thither thoroughly toward truly typically ultimately
underneath undoubtedly unto upward upwards usually versus virtually wherefore
whereof whichever whomsoever widely yeah yesterday today tomorrow tonight
""".split()

# Whole-word lowercase alphabetic forms only; apostrophes never survive
# tokenization as part of a single token.
WORD_RE = re.compile(r"^[a-z]+(?:-[a-z]+)*$")


def ranked(words):
    uniq = sorted({w for w in words if WORD_RE.match(w)})
    return sorted(uniq, key=lambda w: (-wordfreq.word_frequency(w, "en"), w))


def letter_ngrams(n, top, vocab_size=50000):
    counts = collections.Counter()
    for w in wordfreq.top_n_list("en", vocab_size):
        if not re.fullmatch(r"[a-z]+", w):
            continue
        f = wordfreq.word_frequency(w, "en")
        for i in range(len(w) - n + 1):
            counts[w[i : i + n]] += f
    return [g for g, _ in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:top]]


def write(path, header, items):
    path.write_text("".join(f"# {h}\n" for h in header) + "".join(f"{x}\n" for x in items))


def main(out):
    out = pathlib.Path(out)
    fw = ranked(FUNCTION_WORD_CANDIDATES)
    if len(fw) < 512:
        sys.exit(f"need at least 512 function-word candidates, have {len(fw)}")
    write(out / "koppel512.txt",
          ["function-word list, 512 entries, ranked by English frequency",
           "version 1"], fw[:512])
    write(out / "writeprints_function_words.txt",
          ["function-word counts for the writeprints-static set, 403 entries",
           "version 1"], fw[:403])
    write(out / "char_bigrams.txt",
          ["most frequent English letter bigrams (frequency-weighted word list)",
           "version 1"], letter_ngrams(2, 39))
    write(out / "char_trigrams.txt",
          ["most frequent English letter trigrams (frequency-weighted word list)",
           "version 1"], letter_ngrams(3, 20))
    common = [w for w in wordfreq.top_n_list("en", 20000) if WORD_RE.match(w)][:10000]
    write(out / "common_words.txt",
          ["10,000 most frequent English words", "version 1"], common)

    sums = []
    for p in sorted(out.glob("*")):
        if p.suffix in (".txt", ".tsv"):
            sums.append(f"{hashlib.sha256(p.read_bytes()).hexdigest()}  {p.name}")
    (out / "SHA256SUMS").write_text("\n".join(sums) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data")
