use chrono::Duration;

use super::StoreError;

/// Parses the fixed-length subset of ISO-8601 durations: weeks, days, hours,
/// minutes and whole seconds (`P7D`, `P2W`, `PT36H`, `P1DT12H30M`). Years
/// and months are rejected because their length depends on the calendar.
pub fn parse_iso_duration(text: &str) -> Result<Duration, StoreError> {
    let bad = |reason: &str| StoreError::InvalidDuration {
        text: text.to_string(),
        reason: reason.to_string(),
    };
    let rest = text
        .trim()
        .strip_prefix(['P', 'p'])
        .ok_or_else(|| bad("must start with `P`"))?;
    if rest.is_empty() {
        return Err(bad("no components"));
    }

    let mut total = Duration::zero();
    let mut in_time = false;
    let mut digits = String::new();
    let mut seen_any = false;
    let mut last_rank = 0u8;
    for ch in rest.chars() {
        match ch {
            '0'..='9' => digits.push(ch),
            'T' | 't' if !in_time && digits.is_empty() => in_time = true,
            unit => {
                if digits.is_empty() {
                    return Err(bad("unit without a number"));
                }
                let n: i64 = digits.parse().map_err(|_| bad("number too large"))?;
                digits.clear();
                let (rank, step) = match (in_time, unit.to_ascii_uppercase()) {
                    (false, 'W') => (1, Duration::try_weeks(n)),
                    (false, 'D') => (2, Duration::try_days(n)),
                    (true, 'H') => (3, Duration::try_hours(n)),
                    (true, 'M') => (4, Duration::try_minutes(n)),
                    (true, 'S') => (5, Duration::try_seconds(n)),
                    (false, 'Y') | (false, 'M') => return Err(bad("years and months are not supported")),
                    _ => return Err(bad("unexpected character")),
                };
                if rank <= last_rank {
                    return Err(bad("components out of order"));
                }
                last_rank = rank;
                let step = step.ok_or_else(|| bad("out of range"))?;
                total = total.checked_add(&step).ok_or_else(|| bad("out of range"))?;
                seen_any = true;
            }
        }
    }
    if !digits.is_empty() {
        return Err(bad("trailing number without a unit"));
    }
    if !seen_any {
        return Err(bad("no components"));
    }
    if in_time && last_rank < 3 {
        return Err(bad("`T` without time components"));
    }
    Ok(total)
}

/// Formats a duration as `PnDTnHnMnS`, omitting zero components.
pub fn format_iso_duration(d: Duration) -> String {
    let mut secs = d.num_seconds();
    if secs == 0 {
        return "PT0S".to_string();
    }
    let neg = secs < 0;
    secs = secs.abs();
    let (days, rem) = (secs / 86_400, secs % 86_400);
    let (h, m, s) = (rem / 3600, rem % 3600 / 60, rem % 60);
    let mut out = String::from(if neg { "-P" } else { "P" });
    if days > 0 {
        out.push_str(&format!("{days}D"));
    }
    if rem > 0 {
        out.push('T');
        for (v, u) in [(h, 'H'), (m, 'M'), (s, 'S')] {
            if v > 0 {
                out.push_str(&format!("{v}{u}"));
            }
        }
    }
    out
}
