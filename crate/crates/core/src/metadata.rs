use crate::record::UserRecord;

pub const METADATA_DIM: usize = 4;

/// Profile metadata in feature order: friends, followers, statuses, verified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetadataFeatures {
    pub friends_count: f64,
    pub followers_count: f64,
    pub statuses_count: f64,
    pub verified: f64,
}

impl MetadataFeatures {
    pub fn to_array(self) -> [f64; METADATA_DIM] {
        [
            self.friends_count,
            self.followers_count,
            self.statuses_count,
            self.verified,
        ]
    }
}

pub fn extract_metadata_features(record: &UserRecord) -> MetadataFeatures {
    MetadataFeatures {
        friends_count: record.friends_count as f64,
        followers_count: record.followers_count as f64,
        statuses_count: record.statuses_count as f64,
        verified: if record.verified { 1.0 } else { 0.0 },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(friends: u64, followers: u64, statuses: u64, verified: bool) -> UserRecord {
        UserRecord {
            friends_count: friends,
            followers_count: followers,
            statuses_count: statuses,
            verified,
            ..UserRecord::new("u")
        }
    }

    #[test]
    fn direct_mapping() {
        let f = extract_metadata_features(&record(10, 20, 30, true));
        assert_eq!(f.to_array(), [10.0, 20.0, 30.0, 1.0]);
        let f = extract_metadata_features(&record(0, 0, 0, false));
        assert_eq!(f.to_array(), [0.0; 4]);
        let f = extract_metadata_features(&record(0, 1_000_000, 5, false));
        assert_eq!(f.to_array(), [0.0, 1_000_000.0, 5.0, 0.0]);
    }

    #[test]
    fn ignores_unrelated_fields() {
        let a = record(1, 2, 3, true);
        let mut b = a.clone();
        b.user_id = "other".into();
        b.tweet_text = "text".into();
        b.retweet_count = 99;
        b.image_vector_ref = Some("x".into());
        assert_eq!(extract_metadata_features(&a), extract_metadata_features(&b));
    }
}
