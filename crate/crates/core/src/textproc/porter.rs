//! The Porter (1980) suffix-stripping stemmer, original rule set.
//!
//! Operates on ASCII; tokens containing any other character are returned
//! unchanged. Digits count as consonants.

/// Stems one lowercase token.
pub fn stem(token: &str) -> String {
    if token.is_empty() || !token.is_ascii() {
        return token.to_string();
    }
    let mut w = Word(token.as_bytes().to_vec());
    w.step1a();
    w.step1b();
    w.step1c();
    w.step2();
    w.step3();
    w.step4();
    w.step5a();
    w.step5b();
    // only ASCII bytes were ever written
    String::from_utf8(w.0).expect("ascii in, ascii out")
}

struct Word(Vec<u8>);

fn is_vowel_letter(c: u8) -> bool {
    matches!(c, b'a' | b'e' | b'i' | b'o' | b'u')
}

/// Consonant flags for `s`; `y` is a consonant at the start or after a vowel.
fn consonant_flags(s: &[u8]) -> Vec<bool> {
    let mut flags: Vec<bool> = Vec::with_capacity(s.len());
    for (i, &c) in s.iter().enumerate() {
        let cons = if is_vowel_letter(c) {
            false
        } else if c == b'y' {
            i == 0 || !flags[i - 1]
        } else {
            true
        };
        flags.push(cons);
    }
    flags
}

/// m in [C](VC){m}[V].
fn measure(s: &[u8]) -> usize {
    let flags = consonant_flags(s);
    flags
        .windows(2)
        .filter(|w| !w[0] && w[1])
        .count()
}

fn has_vowel(s: &[u8]) -> bool {
    consonant_flags(s).iter().any(|c| !c)
}

fn ends_double_consonant(s: &[u8]) -> bool {
    let n = s.len();
    n >= 2 && s[n - 1] == s[n - 2] && consonant_flags(s)[n - 1]
}

/// *o: ends consonant-vowel-consonant, last not w, x or y.
fn ends_cvc(s: &[u8]) -> bool {
    let n = s.len();
    if n < 3 {
        return false;
    }
    let f = consonant_flags(s);
    f[n - 3] && !f[n - 2] && f[n - 1] && !matches!(s[n - 1], b'w' | b'x' | b'y')
}

type Cond = fn(&[u8]) -> bool;

fn m_gt0(s: &[u8]) -> bool {
    measure(s) > 0
}

fn m_gt1(s: &[u8]) -> bool {
    measure(s) > 1
}

fn m_gt1_s_or_t(s: &[u8]) -> bool {
    measure(s) > 1 && matches!(s.last(), Some(b's' | b't'))
}

impl Word {
    fn ends(&self, suffix: &str) -> bool {
        self.0.ends_with(suffix.as_bytes())
    }

    fn stem_without(&self, suffix: &str) -> &[u8] {
        &self.0[..self.0.len() - suffix.len()]
    }

    fn replace_suffix(&mut self, suffix: &str, with: &str) {
        let n = self.0.len() - suffix.len();
        self.0.truncate(n);
        self.0.extend_from_slice(with.as_bytes());
    }

    /// The first rule whose suffix matches decides; if its condition fails
    /// the word is left alone.
    fn apply_rules(&mut self, rules: &[(&str, &str, Cond)]) -> bool {
        for &(suffix, with, cond) in rules {
            if self.ends(suffix) {
                if cond(self.stem_without(suffix)) {
                    self.replace_suffix(suffix, with);
                    return true;
                }
                return false;
            }
        }
        false
    }

    fn step1a(&mut self) {
        if self.ends("sses") {
            self.replace_suffix("sses", "ss");
        } else if self.ends("ies") {
            self.replace_suffix("ies", "i");
        } else if self.ends("ss") {
        } else if self.ends("s") {
            self.replace_suffix("s", "");
        }
    }

    fn step1b(&mut self) {
        if self.ends("eed") {
            if measure(self.stem_without("eed")) > 0 {
                self.replace_suffix("eed", "ee");
            }
            return;
        }
        let stripped = if self.ends("ed") && has_vowel(self.stem_without("ed")) {
            self.replace_suffix("ed", "");
            true
        } else if self.ends("ing") && has_vowel(self.stem_without("ing")) {
            self.replace_suffix("ing", "");
            true
        } else {
            false
        };
        if !stripped {
            return;
        }
        if self.ends("at") {
            self.replace_suffix("at", "ate");
        } else if self.ends("bl") {
            self.replace_suffix("bl", "ble");
        } else if self.ends("iz") {
            self.replace_suffix("iz", "ize");
        } else if ends_double_consonant(&self.0) {
            if !matches!(self.0.last(), Some(b'l' | b's' | b'z')) {
                self.0.pop();
            }
        } else if measure(&self.0) == 1 && ends_cvc(&self.0) {
            self.0.push(b'e');
        }
    }

    fn step1c(&mut self) {
        if self.ends("y") && has_vowel(self.stem_without("y")) {
            self.replace_suffix("y", "i");
        }
    }

    fn step2(&mut self) {
        self.apply_rules(&[
            ("ational", "ate", m_gt0),
            ("tional", "tion", m_gt0),
            ("enci", "ence", m_gt0),
            ("anci", "ance", m_gt0),
            ("izer", "ize", m_gt0),
            ("abli", "able", m_gt0),
            ("alli", "al", m_gt0),
            ("entli", "ent", m_gt0),
            ("eli", "e", m_gt0),
            ("ousli", "ous", m_gt0),
            ("ization", "ize", m_gt0),
            ("ation", "ate", m_gt0),
            ("ator", "ate", m_gt0),
            ("alism", "al", m_gt0),
            ("iveness", "ive", m_gt0),
            ("fulness", "ful", m_gt0),
            ("ousness", "ous", m_gt0),
            ("aliti", "al", m_gt0),
            ("iviti", "ive", m_gt0),
            ("biliti", "ble", m_gt0),
        ]);
    }

    fn step3(&mut self) {
        self.apply_rules(&[
            ("icate", "ic", m_gt0),
            ("ative", "", m_gt0),
            ("alize", "al", m_gt0),
            ("iciti", "ic", m_gt0),
            ("ical", "ic", m_gt0),
            ("ful", "", m_gt0),
            ("ness", "", m_gt0),
        ]);
    }

    fn step4(&mut self) {
        self.apply_rules(&[
            ("al", "", m_gt1),
            ("ance", "", m_gt1),
            ("ence", "", m_gt1),
            ("er", "", m_gt1),
            ("ic", "", m_gt1),
            ("able", "", m_gt1),
            ("ible", "", m_gt1),
            ("ant", "", m_gt1),
            ("ement", "", m_gt1),
            ("ment", "", m_gt1),
            ("ent", "", m_gt1),
            ("ion", "", m_gt1_s_or_t),
            ("ou", "", m_gt1),
            ("ism", "", m_gt1),
            ("ate", "", m_gt1),
            ("iti", "", m_gt1),
            ("ous", "", m_gt1),
            ("ive", "", m_gt1),
            ("ize", "", m_gt1),
        ]);
    }

    fn step5a(&mut self) {
        if self.ends("e") {
            let stem = self.stem_without("e");
            let m = measure(stem);
            if m > 1 || (m == 1 && !ends_cvc(stem)) {
                self.0.pop();
            }
        }
    }

    fn step5b(&mut self) {
        if self.ends("ll") && measure(&self.0) > 1 {
            self.0.pop();
        }
    }
}
