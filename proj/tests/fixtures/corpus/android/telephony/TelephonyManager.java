package android.telephony;

import android.content.Context;

/**
 * Provides access to information about the telephony services on the device.
 */
public class TelephonyManager {
    private final Context mContext;
    private static final int PHONE_TYPE_GSM = 1;
    private String mImei = "";

    /** @hide */
    public TelephonyManager(Context context) {
        mContext = context;
    }

    /**
     * Returns the IMEI (International Mobile Equipment Identity).
     * @return the IMEI, or null if not available.
     */
    public String getImei() {
        return getImei(getSlotIndex());
    }

    /**
     * Returns the IMEI for the given slot.
     *
     * @param slotIndex of which IMEI is returned
     */
    public String getImei(int slotIndex) {
        if (slotIndex < 0) {
            return null;
        }
        return mImei + slotIndex;
    }

    /**
     * Returns the phone number string for line 1, for example, the MSISDN
     * for a GSM phone.
     */
    @Deprecated
    public String getLine1Number() {
        String number = mContext.getSystemService("phone").toString();
        return number;
    }

    public int getPhoneType() {
        return PHONE_TYPE_GSM;
    }

    /** Returns the current slot. */
    private int getSlotIndex() {
        return 0;
    }

    /**
     * Returns the ISO country code of the current registered operator.
     */
    public static native String nativeGetNetworkCountryIso();
}
