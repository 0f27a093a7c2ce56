/**
 * Share-content builder used by every share affordance on the landing page.
 * Copy text plus prefilled links for two social platforms and email; no
 * platform SDKs involved.
 */

export interface ShareContent {
  shareUrl: string;
  copyText: string;
  twitterUrl: string;
  facebookUrl: string;
  mailtoUrl: string;
}

const PITCH =
  "I'm in a referral contest where the whole invite chain gets rewarded " +
  "if someone down the line wins. Join through my link:";

export function buildShareContent(shareUrl: string): ShareContent {
  const text = `${PITCH} ${shareUrl}`;
  return {
    shareUrl,
    copyText: text,
    twitterUrl: `https://twitter.com/intent/tweet?text=${encodeURIComponent(text)}`,
    facebookUrl: `https://www.facebook.com/sharer/sharer.php?u=${encodeURIComponent(shareUrl)}`,
    mailtoUrl:
      "mailto:?subject=" +
      encodeURIComponent("Join me in this referral contest") +
      "&body=" +
      encodeURIComponent(text),
  };
}
