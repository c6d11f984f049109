//! CoNLL-U reading and writing.
//!
//! Only ID, FORM, UPOS and XPOS are interpreted. The remaining columns,
//! comments, multiword ranges and empty nodes are carried through untouched
//! so a parsed file can be written back.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::tagset::{compatible_upos, is_upos, xpos_reduce};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConlluWord {
    pub id: usize,
    pub form: String,
    pub lemma: String,
    pub upos: String,
    pub xpos: String,
    /// FEATS, HEAD, DEPREL, DEPS, MISC
    pub rest: [String; 5],
    /// 1-based line number in the source file.
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConlluLine {
    Word(ConlluWord),
    /// Multiword token range (`3-4`) or empty node (`5.1`), kept verbatim.
    Other(String),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConlluSentence {
    pub comments: Vec<String>,
    pub lines: Vec<ConlluLine>,
}

impl ConlluSentence {
    pub fn words(&self) -> impl Iterator<Item = &ConlluWord> {
        self.lines.iter().filter_map(|l| match l {
            ConlluLine::Word(w) => Some(w),
            ConlluLine::Other(_) => None,
        })
    }
}

/// One sentence of the POS task.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosExample {
    pub words: Vec<String>,
    pub upos: Vec<String>,
    pub xpos_full: Vec<String>,
    pub xpos: Vec<char>,
}

/// An (XPOS, UPOS) pair outside the documented tagset relation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MappingViolation {
    pub sentence: usize,
    pub word: usize,
    pub xpos: char,
    pub upos: String,
}

pub fn parse_conllu<R: BufRead>(reader: R) -> Result<Vec<ConlluSentence>> {
    let mut sentences = Vec::new();
    let mut current = ConlluSentence::default();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = n + 1;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            if !current.lines.is_empty() || !current.comments.is_empty() {
                sentences.push(std::mem::take(&mut current));
            }
            continue;
        }
        if line.starts_with('#') {
            current.comments.push(line.to_owned());
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(Error::parse(lineno, format!("expected 10 tab-separated columns, found {}", cols.len())));
        }
        if cols[0].contains('-') || cols[0].contains('.') {
            current.lines.push(ConlluLine::Other(line.to_owned()));
            continue;
        }
        let id = cols[0]
            .parse()
            .map_err(|_| Error::parse(lineno, format!("invalid token id `{}`", cols[0])))?;
        current.lines.push(ConlluLine::Word(ConlluWord {
            id,
            form: cols[1].to_owned(),
            lemma: cols[2].to_owned(),
            upos: cols[3].to_owned(),
            xpos: cols[4].to_owned(),
            rest: [cols[5], cols[6], cols[7], cols[8], cols[9]].map(str::to_owned),
            line: lineno,
        }));
    }
    if !current.lines.is_empty() || !current.comments.is_empty() {
        sentences.push(current);
    }
    Ok(sentences)
}

pub fn write_conllu<W: Write>(mut out: W, sentences: &[ConlluSentence]) -> Result<()> {
    for s in sentences {
        for c in &s.comments {
            writeln!(out, "{c}")?;
        }
        for l in &s.lines {
            match l {
                ConlluLine::Word(w) => {
                    write!(out, "{}\t{}\t{}\t{}\t{}", w.id, w.form, w.lemma, w.upos, w.xpos)?;
                    for r in &w.rest {
                        write!(out, "\t{r}")?;
                    }
                    writeln!(out)?;
                }
                ConlluLine::Other(raw) => writeln!(out, "{raw}")?,
            }
        }
        writeln!(out)?;
    }
    Ok(())
}

impl TryFrom<&ConlluSentence> for PosExample {
    type Error = Error;

    fn try_from(s: &ConlluSentence) -> Result<Self> {
        let mut ex = PosExample {
            words: Vec::new(),
            upos: Vec::new(),
            xpos_full: Vec::new(),
            xpos: Vec::new(),
        };
        for w in s.words() {
            if !is_upos(&w.upos) {
                return Err(Error::parse(w.line, format!("unknown UPOS tag `{}`", w.upos)));
            }
            let reduced = xpos_reduce(&w.xpos).map_err(|e| Error::parse(w.line, e.to_string()))?;
            ex.words.push(w.form.clone());
            ex.upos.push(w.upos.clone());
            ex.xpos_full.push(w.xpos.clone());
            ex.xpos.push(reduced);
        }
        Ok(ex)
    }
}

pub fn read_conllu_from<R: BufRead>(reader: R) -> Result<Vec<PosExample>> {
    parse_conllu(reader)?
        .iter()
        .filter(|s| s.words().next().is_some())
        .map(PosExample::try_from)
        .collect()
}

/// Reads a CoNLL-U file into POS examples, one per sentence.
pub fn read_conllu(path: &Path) -> Result<Vec<PosExample>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_conllu_from(BufReader::new(file))
}

/// Lists every word whose (XPOS, UPOS) pair falls outside the tagset
/// relation. Treebanks contain such noise, so this reports instead of failing.
pub fn mapping_violations(examples: &[PosExample]) -> Vec<MappingViolation> {
    let mut out = Vec::new();
    for (si, ex) in examples.iter().enumerate() {
        for (wi, (x, u)) in ex.xpos.iter().zip(&ex.upos).enumerate() {
            if !compatible_upos(*x).contains(&u.as_str()) {
                out.push(MappingViolation {
                    sentence: si,
                    word: wi,
                    xpos: *x,
                    upos: u.clone(),
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const FIXTURE: &str = "# sent_id = 1
# text = Pes spí.
1\tPes\tpes\tNOUN\tSSis1\tGender=Masc\t2\tnsubj\t_\t_
2\tspí\tspať\tVERB\tVKesc+\t_\t0\troot\t_\tSpaceAfter=No
3\t.\t.\tPUNCT\tZ\t_\t2\tpunct\t_\t_

# sent_id = 2
1-2\tAby\t_\t_\t_\t_\t_\t_\t_\t_
1\tAb\taby\tSCONJ\tOs\t_\t3\tmark\t_\t_
2\ty\tby\tAUX\tY\t_\t3\taux\t_\t_
3\tšiel\tísť\tVERB\tVLescm+\t_\t0\troot\t_\t_

1\tÁno\táno\tPART\tT\t_\t0\troot\t_\t_
2\t!\t!\tPUNCT\tZ\t_\t1\tpunct\t_\t_
";

    #[test]
    fn reads_examples() {
        let ex = read_conllu_from(FIXTURE.as_bytes()).unwrap();
        let counts: Vec<usize> = ex.iter().map(|e| e.words.len()).collect();
        assert_eq!(counts, [3, 3, 2]);
        assert_eq!(ex[0].words, ["Pes", "spí", "."]);
        assert_eq!(ex[0].upos, ["NOUN", "VERB", "PUNCT"]);
        assert_eq!(ex[0].xpos, ['S', 'V', 'Z']);
        assert_eq!(ex[1].words, ["Ab", "y", "šiel"]);
    }

    #[test]
    fn single_word_block() {
        let ex = read_conllu_from("1\tpes\tpes\tNOUN\tSSis1\t_\t0\troot\t_\t_\n".as_bytes()).unwrap();
        assert_eq!(ex[0].words, ["pes"]);
        assert_eq!(ex[0].upos, ["NOUN"]);
        assert_eq!(ex[0].xpos, ['S']);
    }

    #[test]
    fn empty_file() {
        assert!(read_conllu_from("".as_bytes()).unwrap().is_empty());
    }

    #[test]
    fn bad_column_count_reports_line() {
        let err = read_conllu_from("# c\n1\tpes\tNOUN\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: Some(2), .. }), "{err}");
    }

    #[test]
    fn bad_xpos_reports_line() {
        let err = read_conllu_from("\n1\tpes\tpes\tNOUN\tx\t_\t0\troot\t_\t_\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: Some(2), .. }), "{err}");
    }

    #[test]
    fn round_trip() {
        let parsed = parse_conllu(FIXTURE.as_bytes()).unwrap();
        let mut out = Vec::new();
        write_conllu(&mut out, &parsed).unwrap();
        assert_eq!(String::from_utf8(out.clone()).unwrap(), format!("{FIXTURE}\n"));
        assert_eq!(parse_conllu(out.as_slice()).unwrap(), parsed);
    }

    #[test]
    fn violations_are_reported() {
        let mut ex = read_conllu_from(FIXTURE.as_bytes()).unwrap();
        assert!(mapping_violations(&ex).is_empty());
        ex[0].upos[0] = "VERB".into();
        let v = mapping_violations(&ex);
        assert_eq!(v, [MappingViolation { sentence: 0, word: 0, xpos: 'S', upos: "VERB".into() }]);
    }
}
