/**
 * Landing-page view model: consent gate, email entry, issued share link.
 * Pure state transitions; DOM wiring lives in landing-main.ts.
 */

import { ApiClient, ApiError } from "./api.js";

export interface LandingViewModel {
  consentGiven: boolean;
  emailInput: string;
  issuedShareUrl: string | null;
  errorBanner: string | null;
  retryable: boolean;
}

export function initialViewModel(): LandingViewModel {
  return {
    consentGiven: false,
    emailInput: "",
    issuedShareUrl: null,
    errorBanner: null,
    retryable: false,
  };
}

const EMAIL_RE = /^[^@\s]+@[^@\s]+\.[^@\s]+$/;

export function emailLooksValid(email: string): boolean {
  return EMAIL_RE.test(email.trim());
}

/** Submission stays disabled until consent is given and the email parses. */
export function canSubmit(vm: LandingViewModel): boolean {
  return vm.consentGiven && emailLooksValid(vm.emailInput);
}

export async function submitEmail(
  api: ApiClient,
  vm: LandingViewModel,
): Promise<LandingViewModel> {
  if (!canSubmit(vm)) {
    return { ...vm, errorBanner: "Agree to the consent form and enter a valid email.", retryable: false };
  }
  try {
    const res = await api.createLink(vm.emailInput.trim(), true);
    return { ...vm, issuedShareUrl: res.share_url, errorBanner: null, retryable: false };
  } catch (err) {
    if (err instanceof ApiError) {
      // 422: the service rejected the address; show it inline, no URL
      return {
        ...vm,
        issuedShareUrl: null,
        errorBanner: err.status === 422 ? "That email address doesn't look right." : err.detail,
        retryable: false,
      };
    }
    return {
      ...vm,
      issuedShareUrl: null,
      errorBanner: "Network trouble -- your link was not created. Retry?",
      retryable: true,
    };
  }
}
