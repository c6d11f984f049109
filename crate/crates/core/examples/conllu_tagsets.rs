//! Reads CoNLL-U, reduces XPOS to its first letter and reports pairs that
//! disagree with the UPOS mapping.

use skbench::datasets::tagset::xpos_description;
use skbench::datasets::{mapping_violations, read_conllu_from};

const TREEBANK: &str = "# text = Starý pes spí.
1\tStarý\tstarý\tADJ\tAAms1x\t_\t2\tamod\t_\t_
2\tpes\tpes\tNOUN\tSSms1\t_\t3\tnsubj\t_\t_
3\tspí\tspať\tVERB\tVKesc+\t_\t0\troot\t_\tSpaceAfter=No
4\t.\t.\tPUNCT\tZ\t_\t3\tpunct\t_\t_

# text = Aby prišiel.
1-2\tAby\t_\t_\t_\t_\t_\t_\t_\t_
1\tAb\taby\tSCONJ\tOs\t_\t3\tmark\t_\t_
2\ty\tby\tAUX\tY\t_\t3\taux\t_\t_
3\tprišiel\tprísť\tNOUN\tVLescm+\t_\t0\troot\t_\tSpaceAfter=No
4\t.\t.\tPUNCT\tZ\t_\t3\tpunct\t_\t_
";

fn main() -> skbench::Result<()> {
    let examples = read_conllu_from(TREEBANK.as_bytes())?;
    for ex in &examples {
        for ((w, u), x) in ex.words.iter().zip(&ex.upos).zip(&ex.xpos) {
            println!("{w:<10} {u:<6} {x} ({})", xpos_description(*x).unwrap_or("?"));
        }
        println!();
    }
    // the second sentence tags a verb form as NOUN on purpose
    for v in mapping_violations(&examples) {
        println!("sentence {} word {}: XPOS {} with UPOS {}", v.sentence, v.word, v.xpos, v.upos);
    }
    Ok(())
}
