//! `Accept` header handling for the dereferencing endpoint.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Json,
    Turtle,
    Html,
}

impl Representation {
    /// Offers in order of preference on ties.
    pub const ALL: [Representation; 3] = [Representation::Json, Representation::Turtle, Representation::Html];

    pub fn media_type(self) -> &'static str {
        match self {
            Representation::Json => "application/json",
            Representation::Turtle => "text/turtle",
            Representation::Html => "text/html",
        }
    }
}

struct Range<'a> {
    kind: &'a str,
    sub: &'a str,
    q: f32,
}

fn parse(accept: &str) -> Vec<Range<'_>> {
    accept
        .split(',')
        .filter_map(|item| {
            let mut parts = item.split(';');
            let (kind, sub) = parts.next()?.trim().split_once('/')?;
            let mut q = 1.0;
            for p in parts {
                if let Some(v) = p.trim().strip_prefix("q=") {
                    q = v.trim().parse().ok().filter(|q: &f32| (0.0..=1.0).contains(q))?;
                }
            }
            Some(Range { kind: kind.trim(), sub: sub.trim(), q })
        })
        .collect()
}

/// Quality of `offer` under the most specific matching range, if any.
fn quality(ranges: &[Range<'_>], offer: &str) -> Option<f32> {
    let (kind, sub) = offer.split_once('/').expect("offers are type/subtype");
    ranges
        .iter()
        .filter_map(|r| {
            let specificity = match (r.kind, r.sub) {
                (k, s) if k.eq_ignore_ascii_case(kind) && s.eq_ignore_ascii_case(sub) => 2,
                (k, "*") if k.eq_ignore_ascii_case(kind) => 1,
                ("*", "*") => 0,
                _ => return None,
            };
            Some((specificity, r.q))
        })
        .max_by_key(|&(s, _)| s)
        .map(|(_, q)| q)
}

/// Picks a representation; `None` means nothing offered is acceptable.
/// A missing or blank header selects JSON.
pub fn negotiate(accept: Option<&str>) -> Option<Representation> {
    let accept = match accept.map(str::trim) {
        None | Some("") => return Some(Representation::Json),
        Some(a) => a,
    };
    let ranges = parse(accept);
    let mut best: Option<(Representation, f32)> = None;
    for offer in Representation::ALL {
        if let Some(q) = quality(&ranges, offer.media_type()).filter(|&q| q > 0.0) {
            if best.is_none_or(|(_, b)| q > b) {
                best = Some((offer, q));
            }
        }
    }
    best.map(|(r, _)| r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Representation::*;

    #[test]
    fn exact_types() {
        assert_eq!(negotiate(Some("application/json")), Some(Json));
        assert_eq!(negotiate(Some("text/turtle")), Some(Turtle));
        assert_eq!(negotiate(Some("text/html")), Some(Html));
        assert_eq!(negotiate(None), Some(Json));
    }

    #[test]
    fn unsupported_is_none() {
        assert_eq!(negotiate(Some("image/png")), None);
        assert_eq!(negotiate(Some("application/xml, text/plain")), None);
        assert_eq!(negotiate(Some("text/html;q=0")), None);
    }

    #[test]
    fn wildcards_and_quality() {
        assert_eq!(negotiate(Some("*/*")), Some(Json));
        assert_eq!(negotiate(Some("text/*")), Some(Turtle));
        assert_eq!(negotiate(Some("text/html,application/xhtml+xml,application/xml;q=0.9,*/*;q=0.8")), Some(Html));
        assert_eq!(negotiate(Some("application/json;q=0.5, text/turtle")), Some(Turtle));
        assert_eq!(negotiate(Some("text/*;q=0.3, text/html;q=0.7, */*;q=0.1")), Some(Html));
    }
}
